"""Adapters from raw public-dataset interval tables to the uniform model.

The only schema that ships is the Ordonez-style layout: two whitespace/tab
tables (sensor activations and activity annotations), each with a title
line plus a dashed separator line, local wall-clock timestamps, and
trailing label columns.  Other layouts can be described with
:class:`TableSchema`.

Parsing is tolerant: malformed rows are skipped with a warning instead of
aborting, and the :class:`IngestReport` makes every loss auditable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from zoneinfo import ZoneInfo

from .errors import EmptyFile, MissingFile, NoValidRows
from .model import (
    ActivityAnnotation,
    ActivityMeta,
    Dataset,
    Instant,
    SensorEvent,
    SensorMeta,
    canonicalize,
)

_TAB_SPLIT = re.compile(r"\t+")
_WS_SPLIT = re.compile(r"\s+")


@dataclass(frozen=True, slots=True)
class RawInterval:
    start: Instant
    end: Instant
    columns: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class ParseWarning:
    row: int
    reason: str


@dataclass(frozen=True)
class TableSchema:
    """Shape of a raw interval table.

    ``column_names`` names the label columns that follow the two timestamp
    columns.  ``separator`` is ``"tab"`` (split on tab runs; fields may
    contain single spaces) or ``"whitespace"`` (split on any whitespace;
    timestamp_format must then be space-free per token pair).
    """

    column_names: tuple[str, ...]
    timestamp_format: str = "%Y-%m-%d %H:%M:%S"
    separator: str = "tab"
    header_lines: int = 2

    def __post_init__(self):
        if not self.column_names:
            raise ValueError("schema needs at least one label column")
        if self.separator not in ("tab", "whitespace"):
            raise ValueError(f"unknown separator {self.separator!r}")
        if self.header_lines < 0:
            raise ValueError("header_lines must be >= 0")


ORDONEZ_SENSOR_SCHEMA = TableSchema(column_names=("location", "type", "place"))
ORDONEZ_ADL_SCHEMA = TableSchema(column_names=("activity",))


def _split_row(line: str, schema: TableSchema) -> list[str]:
    if schema.separator == "tab":
        parts = _TAB_SPLIT.split(line.strip())
    else:
        parts = _WS_SPLIT.split(line.strip())
    return [p.strip() for p in parts if p.strip()]


def _timestamp_tokens(fmt: str) -> int:
    # how many whitespace-separated tokens one timestamp occupies
    return len(fmt.split())


def parse_interval_file(
    path: str | Path, schema: TableSchema, tz: ZoneInfo
) -> tuple[list[RawInterval], list[ParseWarning]]:
    """Parse one raw table; malformed rows are skipped with a warning.

    Timestamps are local wall-clock in ``tz`` and converted to UTC millis.
    Blank lines are skipped silently; row order is preserved.
    """
    p = Path(path)
    if not p.is_file():
        raise MissingFile(str(p))
    text = p.read_text(encoding="utf-8", errors="replace")
    lines = text.split("\n")
    if not any(line.strip() for line in lines):
        raise EmptyFile(str(p))

    n_label = len(schema.column_names)
    ts_tokens = _timestamp_tokens(schema.timestamp_format) if schema.separator == "whitespace" else 1
    intervals: list[RawInterval] = []
    warnings: list[ParseWarning] = []

    for lineno, line in enumerate(lines, start=1):
        if lineno <= schema.header_lines:
            continue
        if not line.strip():
            continue
        parts = _split_row(line, schema)
        if schema.separator == "whitespace":
            need = 2 * ts_tokens + n_label
            if len(parts) != need:
                warnings.append(ParseWarning(lineno, f"expected {need} fields, got {len(parts)}"))
                continue
            start_text = " ".join(parts[:ts_tokens])
            end_text = " ".join(parts[ts_tokens:2 * ts_tokens])
            labels = parts[2 * ts_tokens:]
        else:
            need = 2 + n_label
            if len(parts) != need:
                warnings.append(ParseWarning(lineno, f"expected {need} fields, got {len(parts)}"))
                continue
            start_text, end_text = parts[0], parts[1]
            labels = parts[2:]

        try:
            start = _local_to_utc_ms(start_text, schema.timestamp_format, tz)
            end = _local_to_utc_ms(end_text, schema.timestamp_format, tz)
        except ValueError as exc:
            warnings.append(ParseWarning(lineno, f"bad timestamp: {exc}"))
            continue
        if end < start:
            warnings.append(ParseWarning(lineno, "negative duration"))
            continue
        intervals.append(RawInterval(start, end, tuple(labels)))

    return intervals, warnings


def _local_to_utc_ms(text: str, fmt: str, tz: ZoneInfo) -> Instant:
    dt = datetime.strptime(text, fmt).replace(tzinfo=tz)
    return int(dt.timestamp() * 1000)


# --------------------------------------------------------------------------
# annotation overlap resolution
# --------------------------------------------------------------------------

MIN_FRAGMENT_MS = 1000


@dataclass
class ResolutionStats:
    fragments_dropped: int = 0
    fragments_split: int = 0


def resolve_overlaps(
    annotations: list[ActivityAnnotation],
    stats: ResolutionStats | None = None,
) -> list[ActivityAnnotation]:
    """Make each resident's annotations pairwise disjoint.

    The later-starting annotation wins the overlapped span; the earlier one
    is truncated and, if it resumes after the later one ends, split into a
    trailing remainder.  Fragments below one second that were produced by
    cutting are dropped (untouched originals are kept whatever their
    length).  Total covered time never increases.  Idempotent.
    """
    out: list[ActivityAnnotation] = []
    by_resident: dict[str, list[ActivityAnnotation]] = {}
    for ann in annotations:
        by_resident.setdefault(ann.resident_id, []).append(ann)

    for rid in sorted(by_resident):
        anns = sorted(by_resident[rid], key=lambda a: (a.start, a.annotation_id))
        resolved: list[tuple[int, int, ActivityAnnotation]] = []  # (start, end, source)
        for ann in anns:
            next_resolved: list[tuple[int, int, ActivityAnnotation]] = []
            for s, e, src in resolved:
                if e <= ann.start or s >= ann.end:
                    next_resolved.append((s, e, src))
                    continue
                left = (s, min(e, ann.start))
                right = (max(s, ann.end), e)
                if left[0] < left[1]:
                    next_resolved.append((left[0], left[1], src))
                if right[0] < right[1]:
                    next_resolved.append((right[0], right[1], src))
            next_resolved.append((ann.start, ann.end, ann))
            resolved = next_resolved

        pieces_per_source: dict[int, int] = {}
        for s, e, src in resolved:
            cut = (s, e) != (src.start, src.end)
            if cut and e - s < MIN_FRAGMENT_MS:
                if stats is not None:
                    stats.fragments_dropped += 1
                continue
            pieces_per_source[id(src)] = pieces_per_source.get(id(src), 0) + 1
            out.append(replace(src, start=s, end=e))
        if stats is not None:
            stats.fragments_split += sum(n - 1 for n in pieces_per_source.values() if n > 1)

    out.sort(key=lambda a: (a.start, a.end, a.annotation_id))
    return [replace(a, annotation_id=i + 1) for i, a in enumerate(out)]


# --------------------------------------------------------------------------
# Ordonez-style ingest
# --------------------------------------------------------------------------

@dataclass
class FileReport:
    rows_read: int = 0
    rows_kept: int = 0
    rows_skipped: int = 0
    rows_merged: int = 0
    warnings: list[ParseWarning] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_kept": self.rows_kept,
            "rows_skipped": self.rows_skipped,
            "rows_merged": self.rows_merged,
            "warnings": [{"row": w.row, "reason": w.reason} for w in self.warnings],
        }


@dataclass
class IngestReport:
    sensors: FileReport
    annotations: FileReport
    fragments_dropped: int = 0
    fragments_split: int = 0

    def to_dict(self) -> dict:
        return {
            "sensors": self.sensors.to_dict(),
            "annotations": self.annotations.to_dict(),
            "fragments_dropped": self.fragments_dropped,
            "fragments_split": self.fragments_split,
        }


def slugify(*parts: str) -> str:
    return "|".join(p.strip().lower().replace(" ", "_").replace("/", "_") for p in parts)


def _count_nonblank_rows(path: Path, header_lines: int) -> int:
    text = path.read_text(encoding="utf-8", errors="replace")
    return sum(
        1
        for i, line in enumerate(text.split("\n"), start=1)
        if i > header_lines and line.strip()
    )


def merge_sensor_intervals(
    intervals: list[tuple[str, int, int]],
) -> tuple[list[tuple[str, int, int]], int]:
    """Merge same-sensor intervals that overlap or touch.

    Returns the merged list sorted by (start, end, sensor) and the number
    of source intervals absorbed into another one.
    """
    by_sensor: dict[str, list[tuple[int, int]]] = {}
    for sid, s, e in intervals:
        by_sensor.setdefault(sid, []).append((s, e))
    merged: list[tuple[str, int, int]] = []
    absorbed = 0
    for sid, ivs in by_sensor.items():
        ivs.sort()
        cur_s, cur_e = ivs[0]
        for s, e in ivs[1:]:
            if s <= cur_e:
                cur_e = max(cur_e, e)
                absorbed += 1
            else:
                merged.append((sid, cur_s, cur_e))
                cur_s, cur_e = s, e
        merged.append((sid, cur_s, cur_e))
    merged.sort(key=lambda t: (t[1], t[2], t[0]))
    return merged, absorbed


DEFAULT_RESIDENT = "r1"


def ingest_ordonez(
    sensor_path: str | Path,
    annot_path: str | Path,
    name: str,
    tz: str,
    resident_id: str = DEFAULT_RESIDENT,
) -> tuple[Dataset, IngestReport]:
    """Ingest an Ordonez-style two-file home into the uniform model.

    Sensor identity is the ``location|type|place`` slug (the raw layout has
    no id column).  Same-sensor intervals that overlap or touch are merged;
    annotation overlaps are resolved with the later-start-wins rule.
    """
    zone = ZoneInfo(tz)
    raw_sensors, sensor_warnings = parse_interval_file(sensor_path, ORDONEZ_SENSOR_SCHEMA, zone)
    raw_annots, annot_warnings = parse_interval_file(annot_path, ORDONEZ_ADL_SCHEMA, zone)

    sensor_rows = _count_nonblank_rows(Path(sensor_path), ORDONEZ_SENSOR_SCHEMA.header_lines)
    annot_rows = _count_nonblank_rows(Path(annot_path), ORDONEZ_ADL_SCHEMA.header_lines)

    if not raw_sensors:
        raise NoValidRows(f"no valid rows in {sensor_path}")

    catalog: dict[str, SensorMeta] = {}
    intervals: list[tuple[str, int, int]] = []
    for ri in raw_sensors:
        location, kind, place = ri.columns
        sid = slugify(location, kind, place)
        if sid not in catalog:
            catalog[sid] = SensorMeta(sensor_id=sid, label=location, location=place, kind=kind)
        intervals.append((sid, ri.start, ri.end))
    merged, absorbed = merge_sensor_intervals(intervals)
    events = tuple(
        SensorEvent(event_id=i + 1, sensor_id=sid, start=s, end=e)
        for i, (sid, s, e) in enumerate(merged)
    )

    activities: dict[str, ActivityMeta] = {}
    pending: list[ActivityAnnotation] = []
    zero_duration = 0
    for ri in raw_annots:
        (label,) = ri.columns
        aid = slugify(label)
        if aid not in activities:
            activities[aid] = ActivityMeta(activity_id=aid, label=label)
        if ri.end - ri.start <= 0:
            zero_duration += 1
            continue
        pending.append(
            ActivityAnnotation(
                annotation_id=len(pending) + 1,
                resident_id=resident_id,
                activity_id=aid,
                start=ri.start,
                end=ri.end,
            )
        )
    resolution = ResolutionStats()
    resolved = resolve_overlaps(pending, stats=resolution)

    dataset = canonicalize(
        Dataset(
            name=name,
            timezone=tz,
            sensors=tuple(sorted(catalog.values(), key=lambda s: s.sensor_id)),
            activities=tuple(sorted(activities.values(), key=lambda a: a.activity_id)),
            residents=(resident_id,),
            events=events,
            annotations=tuple(resolved),
        )
    )

    report = IngestReport(
        sensors=FileReport(
            rows_read=sensor_rows,
            rows_kept=len(raw_sensors),
            rows_skipped=sensor_rows - len(raw_sensors),
            rows_merged=absorbed,
            warnings=sensor_warnings,
        ),
        annotations=FileReport(
            rows_read=annot_rows,
            rows_kept=len(raw_annots) - zero_duration,
            rows_skipped=annot_rows - len(raw_annots) + zero_duration,
            rows_merged=0,
            warnings=annot_warnings
            + ([ParseWarning(0, f"{zero_duration} zero-duration annotations dropped")]
               if zero_duration else []),
        ),
        fragments_dropped=resolution.fragments_dropped,
        fragments_split=resolution.fragments_split,
    )
    return dataset, report
