"""Rule-based noise filtering of the event stream with a before/after report.

Rules are data (they live in the experiment config as JSON) and are applied
in list order.  Three kinds exist:

- ``drop_short``: remove events shorter than the threshold
- ``clip_long``:  truncate events longer than the threshold (start kept)
- ``merge_gap``:  merge consecutive same-sensor events separated by a gap
  smaller than the threshold

Long activations are clipped rather than deleted: the onset still carries
information even when the tail is noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import UnknownSensorInScope
from .model import DurationStats, SensorEvent, _duration_stats

RULE_KINDS = ("drop_short", "clip_long", "merge_gap")


@dataclass(frozen=True)
class CleaningRule:
    kind: str
    threshold_s: float
    sensors: frozenset[str] | None = None  # None = all sensors

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if not self.threshold_s > 0:
            raise ValueError("threshold_s must be positive")

    @property
    def threshold_ms(self) -> int:
        return round(self.threshold_s * 1000)

    def applies_to(self, sensor_id: str) -> bool:
        return self.sensors is None or sensor_id in self.sensors

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sensors": "all" if self.sensors is None else sorted(self.sensors),
            "threshold_s": self.threshold_s,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CleaningRule":
        sensors = d.get("sensors", "all")
        scope = None if sensors == "all" else frozenset(sensors)
        return cls(kind=d["kind"], threshold_s=d["threshold_s"], sensors=scope)


@dataclass
class RuleCounts:
    kind: str
    events_removed: int = 0
    events_modified: int = 0
    events_merged: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "events_removed": self.events_removed,
            "events_modified": self.events_modified,
            "events_merged": self.events_merged,
        }


@dataclass
class CleaningReport:
    per_rule: list[RuleCounts]
    before_count: int
    after_count: int
    before_sensor_stats: dict[str, DurationStats]
    after_sensor_stats: dict[str, DurationStats]

    def to_dict(self) -> dict:
        return {
            "per_rule": [r.to_dict() for r in self.per_rule],
            "before_count": self.before_count,
            "after_count": self.after_count,
            "before_sensor_stats": {k: v.to_dict() for k, v in self.before_sensor_stats.items()},
            "after_sensor_stats": {k: v.to_dict() for k, v in self.after_sensor_stats.items()},
        }


def _sensor_stats(events: list[SensorEvent]) -> dict[str, DurationStats]:
    by_sensor: dict[str, list[int]] = {}
    for ev in events:
        by_sensor.setdefault(ev.sensor_id, []).append(ev.duration_ms)
    return {sid: _duration_stats(d) for sid, d in sorted(by_sensor.items())}


def _recanonicalize(events: list[SensorEvent]) -> list[SensorEvent]:
    events = sorted(events, key=lambda e: (e.start, e.end, e.event_id))
    return [replace(e, event_id=i + 1) for i, e in enumerate(events)]


def apply_rules(
    events: list[SensorEvent],
    rules: list[CleaningRule],
    known_sensors: set[str] | None = None,
) -> tuple[list[SensorEvent], CleaningReport]:
    """Apply cleaning rules in order; the result is re-canonicalized.

    ``known_sensors`` enables scope validation: a rule naming a sensor
    outside the catalog raises UnknownSensorInScope.
    """
    if known_sensors is not None:
        for rule in rules:
            if rule.sensors is not None:
                unknown = rule.sensors - known_sensors
                if unknown:
                    raise UnknownSensorInScope(
                        f"rule {rule.kind!r} names unknown sensors: {sorted(unknown)}"
                    )

    before = list(events)
    current = list(events)
    per_rule: list[RuleCounts] = []

    for rule in rules:
        counts = RuleCounts(kind=rule.kind)
        if rule.kind == "drop_short":
            kept = []
            for ev in current:
                if rule.applies_to(ev.sensor_id) and ev.duration_ms < rule.threshold_ms:
                    counts.events_removed += 1
                else:
                    kept.append(ev)
            current = kept
        elif rule.kind == "clip_long":
            clipped = []
            for ev in current:
                if rule.applies_to(ev.sensor_id) and ev.duration_ms > rule.threshold_ms:
                    clipped.append(replace(ev, end=ev.start + rule.threshold_ms))
                    counts.events_modified += 1
                else:
                    clipped.append(ev)
            current = clipped
        elif rule.kind == "merge_gap":
            by_sensor: dict[str, list[SensorEvent]] = {}
            for ev in current:
                by_sensor.setdefault(ev.sensor_id, []).append(ev)
            merged_all: list[SensorEvent] = []
            for sid, evs in by_sensor.items():
                evs = sorted(evs, key=lambda e: (e.start, e.end))
                if not rule.applies_to(sid):
                    merged_all.extend(evs)
                    continue
                acc = evs[0]
                for ev in evs[1:]:
                    if ev.start - acc.end < rule.threshold_ms:
                        acc = replace(acc, end=max(acc.end, ev.end))
                        counts.events_merged += 1
                    else:
                        merged_all.append(acc)
                        acc = ev
                merged_all.append(acc)
            current = merged_all
        per_rule.append(counts)

    current = _recanonicalize(current)
    report = CleaningReport(
        per_rule=per_rule,
        before_count=len(before),
        after_count=len(current),
        before_sensor_stats=_sensor_stats(before),
        after_sensor_stats=_sensor_stats(current),
    )
    return current, report
