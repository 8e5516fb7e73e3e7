"""Core domain types, the uniform on-disk dataset format, and exploration stats.

Timestamps are integer milliseconds since the Unix epoch, UTC
(type alias :data:`Instant`).  Intervals are half-open ``[start, end)``.
A dataset carries an IANA timezone used only to derive local calendar
days; all stored instants are UTC.

The uniform dataset directory holds three files:

- ``dataset.meta``    JSON: name, timezone, residents, sensors, activities
- ``events.csv``      columns ``event_id,sensor_id,start,end``
- ``annotations.csv`` columns ``annotation_id,resident_id,activity_id,start,end``

Files are canonical: UTF-8, ``\\n`` line endings, header row, comma
separator, RFC 3339 UTC timestamps with milliseconds
(``YYYY-MM-DDTHH:MM:SS.mmmZ``), records sorted, ids strictly increasing.
Loading then saving a canonical directory is byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
import re
import statistics
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timezone
from pathlib import Path
from zoneinfo import ZoneInfo

from .errors import InvariantViolation, MalformedRow, MissingFile

# UTC milliseconds since the Unix epoch.
Instant = int

#: Reserved synthetic class meaning "no annotated activity"; never in the catalog.
IDLE = "Idle"

_RFC3339_MS = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})\.(\d{3})Z$"
)

META_FILE = "dataset.meta"
EVENTS_FILE = "events.csv"
ANNOTATIONS_FILE = "annotations.csv"

_EVENT_COLUMNS = ["event_id", "sensor_id", "start", "end"]
_ANNOTATION_COLUMNS = ["annotation_id", "resident_id", "activity_id", "start", "end"]


def parse_rfc3339_ms(text: str) -> Instant:
    """Parse a canonical ``YYYY-MM-DDTHH:MM:SS.mmmZ`` timestamp to UTC millis."""
    m = _RFC3339_MS.match(text)
    if not m:
        raise ValueError(f"not an RFC 3339 UTC millisecond timestamp: {text!r}")
    y, mo, d, h, mi, s, ms = (int(g) for g in m.groups())
    dt = datetime(y, mo, d, h, mi, s, tzinfo=timezone.utc)
    return int(dt.timestamp()) * 1000 + ms


def format_rfc3339_ms(instant: Instant) -> str:
    """Format UTC millis canonically, always with exactly 3 decimals."""
    sec, ms = divmod(instant, 1000)
    dt = datetime.fromtimestamp(sec, tz=timezone.utc)
    return f"{dt:%Y-%m-%dT%H:%M:%S}.{ms:03d}Z"


def local_date(instant: Instant, tz: ZoneInfo) -> date:
    """Calendar date of an instant in the given timezone."""
    return datetime.fromtimestamp(instant // 1000, tz=tz).date()


@dataclass(frozen=True, slots=True)
class SensorMeta:
    sensor_id: str
    label: str
    location: str | None = None
    kind: str | None = None


@dataclass(frozen=True, slots=True)
class ActivityMeta:
    activity_id: str
    label: str


@dataclass(frozen=True, slots=True)
class SensorEvent:
    event_id: int
    sensor_id: str
    start: Instant
    end: Instant

    @property
    def duration_ms(self) -> int:
        return self.end - self.start


@dataclass(frozen=True, slots=True)
class ActivityAnnotation:
    annotation_id: int
    resident_id: str
    activity_id: str
    start: Instant
    end: Instant

    @property
    def duration_ms(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Dataset:
    """Immutable uniformized dataset; safe for concurrent reads."""

    name: str
    timezone: str
    sensors: tuple[SensorMeta, ...]
    activities: tuple[ActivityMeta, ...]
    residents: tuple[str, ...]
    events: tuple[SensorEvent, ...]
    annotations: tuple[ActivityAnnotation, ...]

    def tzinfo(self) -> ZoneInfo:
        return ZoneInfo(self.timezone)

    def sensor_ids(self) -> list[str]:
        return [s.sensor_id for s in self.sensors]

    def activity_ids(self) -> list[str]:
        return [a.activity_id for a in self.activities]

    def events_by_sensor(self) -> dict[str, list[SensorEvent]]:
        out: dict[str, list[SensorEvent]] = {s.sensor_id: [] for s in self.sensors}
        for ev in self.events:
            out.setdefault(ev.sensor_id, []).append(ev)
        return out

    def annotations_by_resident(self) -> dict[str, list[ActivityAnnotation]]:
        out: dict[str, list[ActivityAnnotation]] = {r: [] for r in self.residents}
        for ann in self.annotations:
            out.setdefault(ann.resident_id, []).append(ann)
        return out


@dataclass(frozen=True, slots=True)
class Violation:
    code: str
    message: str
    record_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True, slots=True)
class DurationStats:
    count: int
    min_s: float
    mean_s: float
    median_s: float
    max_s: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "min_s": self.min_s,
            "mean_s": self.mean_s,
            "median_s": self.median_s,
            "max_s": self.max_s,
        }


@dataclass(frozen=True)
class StatsReport:
    """Descriptive statistics: durations, frequencies, overlaps."""

    sensor_duration_stats: dict[str, DurationStats]
    activity_duration_stats: dict[str, DurationStats]
    sensor_frequency: dict[str, float]
    overlap_matrix: dict[str, dict[str, float]]

    def to_dict(self) -> dict:
        return {
            "sensor_duration_stats": {
                k: v.to_dict() for k, v in self.sensor_duration_stats.items()
            },
            "activity_duration_stats": {
                k: v.to_dict() for k, v in self.activity_duration_stats.items()
            },
            "sensor_frequency": dict(self.sensor_frequency),
            "overlap_matrix": {k: dict(v) for k, v in self.overlap_matrix.items()},
        }


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def validate(dataset: Dataset) -> ValidationReport:
    """Check every structural invariant; violations are data, not errors."""
    v: list[Violation] = []

    seen_sensors: set[str] = set()
    for s in dataset.sensors:
        if not s.sensor_id:
            v.append(Violation("empty_sensor_id", f"sensor with empty id (label {s.label!r})"))
        elif s.sensor_id in seen_sensors:
            v.append(Violation("duplicate_sensor_id", f"duplicate sensor id {s.sensor_id!r}"))
        seen_sensors.add(s.sensor_id)

    seen_acts: set[str] = set()
    for a in dataset.activities:
        if not a.activity_id:
            v.append(Violation("empty_activity_id", f"activity with empty id (label {a.label!r})"))
        elif a.activity_id in seen_acts:
            v.append(Violation("duplicate_activity_id", f"duplicate activity id {a.activity_id!r}"))
        if a.activity_id == IDLE:
            v.append(Violation("reserved_activity_id", f"{IDLE!r} is reserved and must not be cataloged"))
        seen_acts.add(a.activity_id)

    try:
        ZoneInfo(dataset.timezone)
    except Exception:
        v.append(Violation("bad_timezone", f"unknown IANA timezone {dataset.timezone!r}"))

    sensor_ids = {s.sensor_id for s in dataset.sensors}
    activity_ids = {a.activity_id for a in dataset.activities}
    residents = set(dataset.residents)

    prev_key = None
    prev_id = None
    for ev in dataset.events:
        if ev.start > ev.end:
            v.append(Violation("event_negative_duration",
                               f"event {ev.event_id} has end < start", (ev.event_id,)))
        if ev.sensor_id not in sensor_ids:
            v.append(Violation("unknown_sensor",
                               f"event {ev.event_id} references unknown sensor {ev.sensor_id!r}",
                               (ev.event_id,)))
        key = (ev.start, ev.end, ev.event_id)
        if prev_key is not None and key < prev_key:
            v.append(Violation("events_unsorted",
                               f"event {ev.event_id} out of (start, end, event_id) order",
                               (prev_id, ev.event_id)))
        if prev_id is not None and ev.event_id <= prev_id:
            v.append(Violation("event_ids_not_increasing",
                               f"event ids not strictly increasing at {ev.event_id}",
                               (prev_id, ev.event_id)))
        prev_key, prev_id = key, ev.event_id

    # same-sensor events must not overlap (touching is fine, half-open)
    per_sensor: dict[str, list[SensorEvent]] = {}
    for ev in dataset.events:
        per_sensor.setdefault(ev.sensor_id, []).append(ev)
    for sid, evs in per_sensor.items():
        evs_sorted = sorted(evs, key=lambda e: (e.start, e.end))
        for a, b in zip(evs_sorted, evs_sorted[1:]):
            # half-open: a zero-duration pulse has an empty span and
            # cannot overlap anything
            if max(a.start, b.start) < min(a.end, b.end):
                v.append(Violation("same_sensor_overlap",
                                   f"sensor {sid!r}: events {a.event_id} and {b.event_id} overlap",
                                   (a.event_id, b.event_id)))

    prev_key = None
    prev_id = None
    for ann in dataset.annotations:
        if ann.start >= ann.end:
            v.append(Violation("annotation_not_positive",
                               f"annotation {ann.annotation_id} has zero or negative duration",
                               (ann.annotation_id,)))
        if ann.activity_id not in activity_ids:
            v.append(Violation("unknown_activity",
                               f"annotation {ann.annotation_id} references unknown activity "
                               f"{ann.activity_id!r}", (ann.annotation_id,)))
        if ann.resident_id not in residents:
            v.append(Violation("unknown_resident",
                               f"annotation {ann.annotation_id} references unknown resident "
                               f"{ann.resident_id!r}", (ann.annotation_id,)))
        key = (ann.start, ann.end, ann.annotation_id)
        if prev_key is not None and key < prev_key:
            v.append(Violation("annotations_unsorted",
                               f"annotation {ann.annotation_id} out of order",
                               (prev_id, ann.annotation_id)))
        if prev_id is not None and ann.annotation_id <= prev_id:
            v.append(Violation("annotation_ids_not_increasing",
                               f"annotation ids not strictly increasing at {ann.annotation_id}",
                               (prev_id, ann.annotation_id)))
        prev_key, prev_id = key, ann.annotation_id

    per_resident: dict[str, list[ActivityAnnotation]] = {}
    for ann in dataset.annotations:
        per_resident.setdefault(ann.resident_id, []).append(ann)
    for rid, anns in per_resident.items():
        anns_sorted = sorted(anns, key=lambda a: (a.start, a.end))
        for a, b in zip(anns_sorted, anns_sorted[1:]):
            if a.end > b.start:
                v.append(Violation("resident_annotation_overlap",
                                   f"resident {rid!r}: annotations {a.annotation_id} and "
                                   f"{b.annotation_id} overlap",
                                   (a.annotation_id, b.annotation_id)))

    return ValidationReport(tuple(v))


def canonicalize(dataset: Dataset) -> Dataset:
    """Sort records into canonical order; renumber ids only when needed.

    A dataset whose sorted ids are already strictly increasing is returned
    with ids untouched, so load → save round-trips preserve bytes.
    """
    events = sorted(dataset.events, key=lambda e: (e.start, e.end, e.event_id))
    ids = [e.event_id for e in events]
    if any(b <= a for a, b in zip(ids, ids[1:])):
        events = [replace(e, event_id=i + 1) for i, e in enumerate(events)]

    anns = sorted(dataset.annotations, key=lambda a: (a.start, a.end, a.annotation_id))
    ids = [a.annotation_id for a in anns]
    if any(b <= a for a, b in zip(ids, ids[1:])):
        anns = [replace(a, annotation_id=i + 1) for i, a in enumerate(anns)]

    return replace(
        dataset,
        sensors=tuple(sorted(dataset.sensors, key=lambda s: s.sensor_id)),
        activities=tuple(sorted(dataset.activities, key=lambda a: a.activity_id)),
        residents=tuple(sorted(dataset.residents)),
        events=tuple(events),
        annotations=tuple(anns),
    )


# --------------------------------------------------------------------------
# uniform directory I/O
# --------------------------------------------------------------------------

def save_uniform(dataset: Dataset, dir: str | Path) -> None:
    """Write the canonical three-file layout; deterministic byte-for-byte."""
    ds = canonicalize(dataset)
    report = validate(ds)
    if not report.ok:
        raise InvariantViolation(report)

    out = Path(dir)
    out.mkdir(parents=True, exist_ok=True)

    meta = {
        "name": ds.name,
        "timezone": ds.timezone,
        "residents": list(ds.residents),
        "sensors": [
            {"sensor_id": s.sensor_id, "label": s.label,
             "location": s.location, "kind": s.kind}
            for s in ds.sensors
        ],
        "activities": [
            {"activity_id": a.activity_id, "label": a.label} for a in ds.activities
        ],
    }
    (out / META_FILE).write_text(
        json.dumps(meta, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_EVENT_COLUMNS)
    for ev in ds.events:
        w.writerow([ev.event_id, ev.sensor_id,
                    format_rfc3339_ms(ev.start), format_rfc3339_ms(ev.end)])
    (out / EVENTS_FILE).write_text(buf.getvalue(), encoding="utf-8")

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_ANNOTATION_COLUMNS)
    for ann in ds.annotations:
        w.writerow([ann.annotation_id, ann.resident_id, ann.activity_id,
                    format_rfc3339_ms(ann.start), format_rfc3339_ms(ann.end)])
    (out / ANNOTATIONS_FILE).write_text(buf.getvalue(), encoding="utf-8")


def _read_csv_rows(path: Path, columns: list[str]) -> list[tuple[int, list[str]]]:
    if not path.is_file():
        raise MissingFile(str(path))
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(path.name, 1, "missing header row") from None
        if header != columns:
            raise MalformedRow(path.name, 1,
                               f"unexpected header {header!r}, want {columns!r}")
        out = []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise MalformedRow(path.name, i,
                                   f"expected {len(columns)} fields, got {len(row)}")
            out.append((i, row))
        return out


def load_uniform(dir: str | Path) -> Dataset:
    """Load a uniform dataset directory; every invariant is verified."""
    root = Path(dir)
    meta_path = root / META_FILE
    if not meta_path.is_file():
        raise MissingFile(str(meta_path))
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedRow(META_FILE, exc.lineno, exc.msg) from exc

    try:
        sensors = tuple(
            SensorMeta(s["sensor_id"], s["label"], s.get("location"), s.get("kind"))
            for s in meta["sensors"]
        )
        activities = tuple(
            ActivityMeta(a["activity_id"], a["label"]) for a in meta["activities"]
        )
        ds = Dataset(
            name=meta["name"],
            timezone=meta["timezone"],
            sensors=sensors,
            activities=activities,
            residents=tuple(meta["residents"]),
            events=(),
            annotations=(),
        )
    except (KeyError, TypeError) as exc:
        raise MalformedRow(META_FILE, 1, f"bad meta document: {exc}") from exc

    events = []
    for lineno, row in _read_csv_rows(root / EVENTS_FILE, _EVENT_COLUMNS):
        try:
            ev = SensorEvent(int(row[0]), row[1],
                             parse_rfc3339_ms(row[2]), parse_rfc3339_ms(row[3]))
        except ValueError as exc:
            raise MalformedRow(EVENTS_FILE, lineno, str(exc)) from exc
        if ev.start > ev.end:
            raise MalformedRow(EVENTS_FILE, lineno, "end < start")
        events.append(ev)

    annotations = []
    for lineno, row in _read_csv_rows(root / ANNOTATIONS_FILE, _ANNOTATION_COLUMNS):
        try:
            ann = ActivityAnnotation(int(row[0]), row[1], row[2],
                                     parse_rfc3339_ms(row[3]), parse_rfc3339_ms(row[4]))
        except ValueError as exc:
            raise MalformedRow(ANNOTATIONS_FILE, lineno, str(exc)) from exc
        if ann.start >= ann.end:
            raise MalformedRow(ANNOTATIONS_FILE, lineno, "end <= start")
        annotations.append(ann)

    ds = replace(ds, events=tuple(events), annotations=tuple(annotations))
    report = validate(ds)
    if not report.ok:
        raise InvariantViolation(report)
    return ds


# --------------------------------------------------------------------------
# exploration statistics
# --------------------------------------------------------------------------

def _duration_stats(durations_ms: list[int]) -> DurationStats:
    if not durations_ms:
        return DurationStats(0, 0.0, 0.0, 0.0, 0.0)
    secs = [d / 1000.0 for d in durations_ms]
    return DurationStats(
        count=len(secs),
        min_s=min(secs),
        mean_s=sum(secs) / len(secs),
        median_s=float(statistics.median(secs)),
        max_s=max(secs),
    )


def _interval_intersection_ms(start: int, end: int,
                              intervals: list[tuple[int, int]]) -> int:
    """Overlap of one interval with a sorted disjoint interval list."""
    total = 0
    for s, e in intervals:
        if s >= end:
            break
        lo = max(start, s)
        hi = min(end, e)
        if lo < hi:
            total += hi - lo
    return total


def span_days(dataset: Dataset) -> int:
    """Distinct local calendar dates covered by the dataset extent."""
    instants = [e.start for e in dataset.events] + [e.end for e in dataset.events]
    instants += [a.start for a in dataset.annotations] + [a.end for a in dataset.annotations]
    if not instants:
        return 0
    tz = dataset.tzinfo()
    first = local_date(min(instants), tz)
    # end instants are exclusive: an interval ending at exactly midnight
    # does not reach into the next day
    last_instant = max(instants)
    last = local_date(last_instant - 1 if last_instant > min(instants) else last_instant, tz)
    return (last - first).days + 1


def explore_stats(dataset: Dataset) -> StatsReport:
    """Compute duration, frequency, and activity-sensor overlap statistics."""
    by_sensor = dataset.events_by_sensor()
    sensor_stats = {
        sid: _duration_stats([e.duration_ms for e in evs])
        for sid, evs in sorted(by_sensor.items())
    }

    by_activity: dict[str, list[ActivityAnnotation]] = {
        a.activity_id: [] for a in dataset.activities
    }
    for ann in dataset.annotations:
        by_activity.setdefault(ann.activity_id, []).append(ann)
    activity_stats = {
        aid: _duration_stats([a.duration_ms for a in anns])
        for aid, anns in sorted(by_activity.items())
    }

    n_days = span_days(dataset)
    frequency = {
        sid: (len(evs) / n_days if n_days else 0.0)
        for sid, evs in sorted(by_sensor.items())
    }

    sensor_intervals = {
        sid: sorted((e.start, e.end) for e in evs) for sid, evs in by_sensor.items()
    }
    overlap: dict[str, dict[str, float]] = {}
    for aid in sorted(by_activity):
        anns = by_activity[aid]
        total = sum(a.duration_ms for a in anns)
        row: dict[str, float] = {}
        if total == 0:
            row = {sid: 0.0 for sid in sorted(sensor_intervals)}
        else:
            for sid in sorted(sensor_intervals):
                inter = sum(
                    _interval_intersection_ms(a.start, a.end, sensor_intervals[sid])
                    for a in anns
                )
                row[sid] = inter / total
        overlap[aid] = row

    return StatsReport(
        sensor_duration_stats=sensor_stats,
        activity_duration_stats=activity_stats,
        sensor_frequency=frequency,
        overlap_matrix=overlap,
    )
