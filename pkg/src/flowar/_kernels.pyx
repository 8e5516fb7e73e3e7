# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Mirrors _kernels_py exactly: same tie-breaking, same floating-point
evaluation order (sequential class loop), so results are bit-identical
with the fallback.
"""

import numpy as np

NAME = "compiled"


def best_split(x_bits, y, int n_classes, double min_gain):
    """Best Gini split over binary features; ties go to the smallest index."""
    cdef const unsigned char[:, ::1] xv = np.ascontiguousarray(x_bits, dtype=np.uint8)
    cdef long[::1] yv = np.ascontiguousarray(y, dtype=np.int64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t k = xv.shape[1]
    if n == 0 or k == 0:
        return None

    cdef long[::1] total = np.zeros(n_classes, dtype=np.int64)
    cdef long[:, ::1] right = np.zeros((n_classes, k), dtype=np.int64)
    cdef Py_ssize_t i, f, c

    for i in range(n):
        c = yv[i]
        total[c] += 1
        for f in range(k):
            if xv[i, f]:
                right[c, f] += 1

    cdef int nonzero_classes = 0
    for c in range(n_classes):
        if total[c] > 0:
            nonzero_classes += 1
    if nonzero_classes <= 1:
        return None

    cdef double s = 0.0
    cdef double p
    for c in range(n_classes):
        p = total[c] / (<double> n)
        s += p * p
    cdef double parent_gini = 1.0 - s

    cdef double best_gain = -1.0
    cdef Py_ssize_t best_feature = -1
    cdef long n_right, n_left, lc
    cdef double s_left, s_right, gini_left, gini_right, weighted, gain

    for f in range(k):
        n_right = 0
        for c in range(n_classes):
            n_right += right[c, f]
        n_left = n - n_right
        if n_left == 0 or n_right == 0:
            continue
        s_left = 0.0
        s_right = 0.0
        for c in range(n_classes):
            lc = total[c] - right[c, f]
            p = lc / (<double> n_left)
            s_left += p * p
            p = right[c, f] / (<double> n_right)
            s_right += p * p
        gini_left = 1.0 - s_left
        gini_right = 1.0 - s_right
        weighted = (n_left / (<double> n)) * gini_left + (n_right / (<double> n)) * gini_right
        gain = parent_gini - weighted
        if gain > best_gain:
            best_gain = gain
            best_feature = f

    if best_feature < 0 or best_gain < min_gain:
        return None
    return int(best_feature), float(best_gain)


def featurize_bits(ev_start, ev_end, ev_sensor, win_start, win_end, int n_sensors):
    """Bit matrix: bits[w, s] = 1 iff some event of sensor s intersects window w."""
    cdef long[::1] es = np.ascontiguousarray(ev_start, dtype=np.int64)
    cdef long[::1] ee = np.ascontiguousarray(ev_end, dtype=np.int64)
    cdef long[::1] sn = np.ascontiguousarray(ev_sensor, dtype=np.int64)
    cdef long[::1] ws = np.ascontiguousarray(win_start, dtype=np.int64)
    cdef long[::1] we = np.ascontiguousarray(win_end, dtype=np.int64)
    cdef Py_ssize_t m = es.shape[0]
    cdef Py_ssize_t w = ws.shape[0]

    out = np.zeros((w, n_sensors), dtype=np.uint8)
    cdef unsigned char[:, ::1] bits = out
    cdef Py_ssize_t i, j, lo, hi, mid
    cdef long a, b

    # per-sensor event lists, start-sorted (input is globally start-sorted)
    starts_by = [[] for _ in range(n_sensors)]
    ends_by = [[] for _ in range(n_sensors)]
    for i in range(m):
        if ee[i] > es[i]:  # zero-duration pulses have empty intersections
            starts_by[sn[i]].append(es[i])
            ends_by[sn[i]].append(ee[i])

    cdef long[::1] sv
    cdef long[::1] evv
    cdef Py_ssize_t ns
    for s in range(n_sensors):
        if not starts_by[s]:
            continue
        sarr = np.array(starts_by[s], dtype=np.int64)
        earr = np.array(ends_by[s], dtype=np.int64)
        order = np.argsort(sarr, kind="stable")
        sarr = np.ascontiguousarray(sarr[order])
        earr = np.ascontiguousarray(earr[order])
        sv = sarr
        evv = earr
        ns = sv.shape[0]
        for j in range(w):
            a = ws[j]
            b = we[j]
            # first event with end > a (ends are sorted: disjoint events)
            lo = 0
            hi = ns
            while lo < hi:
                mid = (lo + hi) // 2
                if evv[mid] <= a:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < ns and sv[lo] < b:
                bits[j, s] = 1
    return out


def nearest_anchor_codes(anchors, codes, times):
    """For each query time, the code of the nearest anchor (ties: earlier)."""
    cdef long[::1] av = np.ascontiguousarray(anchors, dtype=np.int64)
    cdef long[::1] cv = np.ascontiguousarray(codes, dtype=np.int64)
    cdef long[::1] tv = np.ascontiguousarray(times, dtype=np.int64)
    cdef Py_ssize_t n = av.shape[0]
    cdef Py_ssize_t w = tv.shape[0]

    out = np.empty(w, dtype=np.int64)
    cdef long[::1] ov = out
    cdef Py_ssize_t j, lo, hi, mid, pos
    cdef long t

    for j in range(w):
        t = tv[j]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if av[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        pos = lo
        if pos == 0:
            ov[j] = cv[0]
        elif pos == n:
            ov[j] = cv[n - 1]
        elif t - av[pos - 1] <= av[pos] - t:
            ov[j] = cv[pos - 1]
        else:
            ov[j] = cv[pos]
    return out
