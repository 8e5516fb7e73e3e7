"""Implicit segmentation: fixed-width windows centered on sensor transitions.

One segment is produced per distinct transition instant (event start or
end); shared endpoints are deduplicated.  Each window is labeled with the
dominant annotated activity, or Idle when uncovered time strictly exceeds
every activity's covered time.  Windows at the data boundary keep their
full width (features simply see no events there).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from datetime import date

from .errors import NoEvents
from .model import (
    IDLE,
    ActivityAnnotation,
    Dataset,
    Instant,
    SensorEvent,
    local_date,
)


@dataclass(frozen=True, slots=True)
class Segment:
    anchor: Instant
    window_start: Instant
    window_end: Instant
    label: str
    local_day: date


def anchors(events: list[SensorEvent]) -> list[Instant]:
    """Sorted, deduplicated union of all event start and end instants."""
    points = {e.start for e in events} | {e.end for e in events}
    return sorted(points)


def dominant_activity(
    annotations: list[ActivityAnnotation], window: tuple[Instant, Instant]
) -> str:
    """Activity with the largest total intersection with the window.

    Idle wins only when uncovered time strictly exceeds every activity's
    covered time; ties between activities go to the lexicographically
    smallest id, and Idle loses all ties.
    """
    w_start, w_end = window
    width = w_end - w_start
    covered: dict[str, int] = {}
    for ann in annotations:
        lo = max(ann.start, w_start)
        hi = min(ann.end, w_end)
        if lo < hi:
            covered[ann.activity_id] = covered.get(ann.activity_id, 0) + (hi - lo)

    if not covered:
        return IDLE
    best_id = min(covered, key=lambda a: (-covered[a], a))
    best_cov = covered[best_id]
    uncovered = width - sum(covered.values())
    if uncovered > best_cov:
        return IDLE
    return best_id


def segments(
    dataset: Dataset, window_s: float, resident_id: str
) -> list[Segment]:
    """One labeled window per transition instant, sorted by anchor."""
    if window_s <= 0:
        raise ValueError("window_s must be positive")
    if resident_id not in dataset.residents:
        raise KeyError(f"unknown resident {resident_id!r}")
    if not dataset.events:
        raise NoEvents(f"dataset {dataset.name!r} has no events")

    window_ms = round(window_s * 1000)
    anns = [a for a in dataset.annotations if a.resident_id == resident_id]
    anns.sort(key=lambda a: a.start)
    # disjoint per resident, so ends are sorted too
    starts = [a.start for a in anns]
    ends = [a.end for a in anns]
    tz = dataset.tzinfo()

    out: list[Segment] = []
    for anchor in anchors(list(dataset.events)):
        w_start = anchor - window_ms // 2
        w_end = w_start + window_ms
        i = bisect.bisect_right(ends, w_start)
        j = bisect.bisect_left(starts, w_end)
        label = dominant_activity(anns[i:j], (w_start, w_end))
        out.append(
            Segment(
                anchor=anchor,
                window_start=w_start,
                window_end=w_end,
                label=label,
                local_day=local_date(anchor, tz),
            )
        )
    return out
