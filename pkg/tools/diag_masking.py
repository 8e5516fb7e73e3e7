#!/usr/bin/env python3
"""Dev diagnostic: per-class effect of door masking on home B."""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from flowar.config import ExperimentConfig
from flowar.evaluation import evaluate_cv
from flowar.ingest import ingest_ordonez

RAW = Path(__file__).resolve().parents[1] / "data" / "raw"
W = float(sys.argv[1]) if len(sys.argv) > 1 else 300.0


def run(ds, mask):
    cfg = ExperimentConfig(dataset_id=ds.name, window_s=W, masked_sensors=frozenset(mask))
    return evaluate_cv(ds, cfg)


def per_class_table(label, summary):
    print(f"-- {label}: micro={summary.mean_micro_f1:.3f} macro={summary.mean_macro_f1:.3f}")
    support = {}
    for f in summary.folds:
        for c, s in f.scores.per_class.items():
            support[c] = support.get(c, 0) + s.support
    for c in sorted(summary.per_class_mean_f1, key=lambda c: -support.get(c, 0)):
        print(f"   {c:<22} f1={summary.per_class_mean_f1[c]:.3f} support={support.get(c,0)}")
    return support


b, _ = ingest_ordonez(RAW / "home_b_sensors.txt", RAW / "home_b_adls.txt",
                      name="home_b", tz="Europe/Madrid")
doors = [s.sensor_id for s in b.sensors if (s.kind or "").lower() == "door"]
interior = list(doors)

s_un = run(b, [])
s_all = run(b, doors)
s_int = run(b, interior)

per_class_table("unmasked", s_un)
per_class_table("all doors masked", s_all)
per_class_table("interior doors masked", s_int)
print(f"\ndelta all doors:      {s_all.mean_micro_f1 - s_un.mean_micro_f1:+.3f}")
print(f"delta interior only:  {s_int.mean_micro_f1 - s_un.mean_micro_f1:+.3f}")
