"""Pure-Python (numpy) implementations of the hot kernels.

Used when the compiled extension is unavailable.  Both backends must be
bit-identical: same tie-breaking and the same floating-point evaluation
order (class loop innermost, sequential).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def best_split(x_bits: np.ndarray, y: np.ndarray, n_classes: int,
               min_gain: float) -> tuple[int, float] | None:
    """Best Gini split over binary features.

    Returns (feature_index, gain) with ties broken toward the smallest
    feature index, or None when the node is pure or no feature has both
    children non-empty with gain >= min_gain.
    """
    n, k = x_bits.shape
    if n == 0 or k == 0:
        return None

    total = np.bincount(y, minlength=n_classes).astype(np.int64)
    if int(np.count_nonzero(total)) <= 1:
        return None
    s = 0.0
    for c in range(n_classes):
        p = int(total[c]) / n
        s += p * p
    parent_gini = 1.0 - s

    right_counts = np.zeros((n_classes, k), dtype=np.int64)
    for c in range(n_classes):
        rows = x_bits[y == c]
        if rows.shape[0]:
            right_counts[c] = rows.sum(axis=0, dtype=np.int64)
    left_counts = total[:, None] - right_counts

    n_right = right_counts.sum(axis=0)
    n_left = n - n_right
    valid = (n_left > 0) & (n_right > 0)

    s_left = np.zeros(k)
    s_right = np.zeros(k)
    safe_left = np.where(valid, n_left, 1)
    safe_right = np.where(valid, n_right, 1)
    for c in range(n_classes):
        p = left_counts[c] / safe_left
        s_left += p * p
        p = right_counts[c] / safe_right
        s_right += p * p
    gini_left = 1.0 - s_left
    gini_right = 1.0 - s_right

    weighted = (n_left / n) * gini_left + (n_right / n) * gini_right
    gains = parent_gini - weighted
    gains[~valid] = -1.0

    best = int(np.argmax(gains))
    best_gain = float(gains[best])
    if not valid[best] or best_gain < min_gain:
        return None
    return best, best_gain


def featurize_bits(ev_start: np.ndarray, ev_end: np.ndarray, ev_sensor: np.ndarray,
                   win_start: np.ndarray, win_end: np.ndarray,
                   n_sensors: int) -> np.ndarray:
    """Bit matrix: bits[w, s] = 1 iff some event of sensor s has a non-empty
    intersection with half-open window w.

    Per-sensor events must be pairwise disjoint (so starts and ends are
    both sorted once the subset is in start order).
    """
    n_win = win_start.shape[0]
    bits = np.zeros((n_win, n_sensors), dtype=np.uint8)
    live = ev_end > ev_start  # zero-duration pulses have empty intersections
    for s in range(n_sensors):
        sel = (ev_sensor == s) & live
        starts = ev_start[sel]
        ends = ev_end[sel]
        if starts.shape[0] == 0:
            continue
        order = np.argsort(starts, kind="stable")
        starts = starts[order]
        ends = ends[order]
        idx = np.searchsorted(ends, win_start, side="right")
        inside = idx < starts.shape[0]
        hit = np.zeros(n_win, dtype=bool)
        hit[inside] = starts[idx[inside]] < win_end[inside]
        bits[:, s] = hit.astype(np.uint8)
    return bits


def nearest_anchor_codes(anchors: np.ndarray, codes: np.ndarray,
                         times: np.ndarray) -> np.ndarray:
    """For each query time, the code of the nearest anchor (ties: earlier)."""
    codes = np.asarray(codes, dtype=np.int64)
    n = anchors.shape[0]
    pos = np.searchsorted(anchors, times, side="left")
    left = np.clip(pos - 1, 0, n - 1)
    right = np.clip(pos, 0, n - 1)
    d_left = times - anchors[left]
    d_right = anchors[right] - times
    take_left = (pos > 0) & ((pos == n) | (d_left <= d_right))
    idx = np.where(take_left, left, right)
    return codes[idx]
