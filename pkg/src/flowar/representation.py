"""Binary sensor-state featurization of segments, with sensor masking.

A segment's feature vector has one bit per unmasked sensor (lexicographic
sensor_id order): 1 iff some event of that sensor has a non-empty
intersection with the half-open window.  Masked sensors are removed from
the vector entirely, not zeroed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np

from . import _backend
from .errors import EmptyInstances, UnknownSensorInMask
from .model import Dataset, Instant
from .segmentation import Segment


@dataclass(frozen=True, slots=True)
class LabeledInstance:
    features: tuple[int, ...]
    label: str
    anchor: Instant
    local_day: date


def feature_order(dataset: Dataset, mask: set[str] | frozenset[str]) -> list[str]:
    """Unmasked sensor ids, lexicographically sorted (the bit order)."""
    unknown = set(mask) - set(dataset.sensor_ids())
    if unknown:
        raise UnknownSensorInMask(f"mask names unknown sensors: {sorted(unknown)}")
    return sorted(s for s in dataset.sensor_ids() if s not in mask)


def featurize(
    dataset: Dataset, segments: list[Segment], mask: set[str] | frozenset[str] = frozenset()
) -> list[LabeledInstance]:
    """One instance per segment, order preserved."""
    order = feature_order(dataset, mask)
    index = {sid: i for i, sid in enumerate(order)}

    kept = [e for e in dataset.events if e.sensor_id in index]
    ev_start = np.fromiter((e.start for e in kept), dtype=np.int64, count=len(kept))
    ev_end = np.fromiter((e.end for e in kept), dtype=np.int64, count=len(kept))
    ev_sensor = np.fromiter((index[e.sensor_id] for e in kept), dtype=np.int64, count=len(kept))
    win_start = np.fromiter((s.window_start for s in segments), dtype=np.int64, count=len(segments))
    win_end = np.fromiter((s.window_end for s in segments), dtype=np.int64, count=len(segments))

    bits = _backend.featurize_bits(ev_start, ev_end, ev_sensor, win_start, win_end, len(order))
    return [
        LabeledInstance(
            features=tuple(int(b) for b in bits[i]),
            label=seg.label,
            anchor=seg.anchor,
            local_day=seg.local_day,
        )
        for i, seg in enumerate(segments)
    ]


def feature_distribution(
    instances: list[LabeledInstance], sensor_order: list[str]
) -> dict[str, dict]:
    """Per-class activation rate of each feature bit, plus class counts.

    Classes absent from the instance list are omitted.
    """
    if not instances:
        raise EmptyInstances("no instances")
    k = len(sensor_order)
    totals: dict[str, int] = {}
    ones: dict[str, list[int]] = {}
    for inst in instances:
        if len(inst.features) != k:
            raise ValueError(
                f"instance has {len(inst.features)} features, expected {k}"
            )
        totals[inst.label] = totals.get(inst.label, 0) + 1
        acc = ones.setdefault(inst.label, [0] * k)
        for i, b in enumerate(inst.features):
            if b:
                acc[i] += 1

    return {
        label: {
            "count": totals[label],
            "rates": {
                sensor_order[i]: ones[label][i] / totals[label] for i in range(k)
            },
        }
        for label in sorted(totals)
    }
