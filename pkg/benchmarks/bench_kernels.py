#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from flowar._backend import available_backends


def make_split_problem(n=4000, k=16, n_classes=10, seed=0):
    rng = np.random.default_rng(seed)
    x = (rng.random((n, k)) < 0.3).astype(np.uint8)
    y = rng.integers(0, n_classes, n).astype(np.int64)
    return (x, y, n_classes, 0.0)


def make_featurize_problem(n_events=20_000, n_sensors=16, n_windows=40_000, seed=0):
    rng = random.Random(seed)
    events = []
    for s in range(n_sensors):
        t = 0
        for _ in range(n_events // n_sensors):
            t += rng.randint(1, 30)
            dur = rng.randint(1, 60)
            events.append((t * 1000, (t + dur) * 1000, s))
            t += dur
    events.sort()
    ev_start = np.array([e[0] for e in events], dtype=np.int64)
    ev_end = np.array([e[1] for e in events], dtype=np.int64)
    ev_sensor = np.array([e[2] for e in events], dtype=np.int64)
    anchors = np.unique(np.concatenate([ev_start, ev_end]))[:n_windows]
    return (ev_start, ev_end, ev_sensor, anchors - 30_000, anchors + 30_000, n_sensors)


def make_timeline_problem(n_anchors=5000, n_frames=500_000, seed=0):
    rng = np.random.default_rng(seed)
    anchors = np.sort(rng.choice(n_frames * 1000, n_anchors, replace=False)).astype(np.int64)
    codes = rng.integers(0, 12, n_anchors).astype(np.int64)
    times = (np.arange(n_frames, dtype=np.int64)) * 1000
    return (anchors, codes, times)


def bench(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    problems = {
        "best_split (4000x16, 10 classes)": ("best_split", make_split_problem()),
        "featurize_bits (20k events, 40k windows)": ("featurize_bits", make_featurize_problem()),
        "nearest_anchor_codes (5k anchors, 500k frames)": ("nearest_anchor_codes", make_timeline_problem()),
    }

    width = max(len(p) for p in problems) + 2
    print(f"{'kernel':<{width}}" + "".join(f"{name:>14}" for name in backends) +
          f"{'speedup':>10}")
    for label, (fn_name, prob_args) in problems.items():
        times = {}
        for name, impl in backends.items():
            times[name] = bench(getattr(impl, fn_name), prob_args, args.repeat)
        row = f"{label:<{width}}" + "".join(f"{times[n] * 1000:>12.2f}ms" for n in backends)
        if "compiled" in times and "python" in times:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)

    if "compiled" not in backends:
        print("\ncompiled kernels not built; showing pure-Python numbers only")


if __name__ == "__main__":
    main()
