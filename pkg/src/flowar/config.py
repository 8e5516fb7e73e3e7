"""Experiment configuration: the full parameterization of one pipeline run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cleaning import CleaningRule
from .classifier import TreeParams


@dataclass(frozen=True)
class ExperimentConfig:
    dataset_id: str
    resident_id: str | None = None  # None = sole resident of the dataset
    cleaning_rules: tuple[CleaningRule, ...] = ()
    window_s: float = 60.0
    masked_sensors: frozenset[str] = frozenset()
    tree_params: TreeParams = field(default_factory=TreeParams)
    min_train_days: int = 1
    timeline_resolution_s: float = 1.0
    notes: str = ""

    def __post_init__(self):
        if not self.window_s > 0:
            raise ValueError("window_s must be positive")
        if self.min_train_days < 1:
            raise ValueError("min_train_days must be >= 1")
        if not self.timeline_resolution_s > 0:
            raise ValueError("timeline_resolution_s must be positive")

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "resident_id": self.resident_id,
            "cleaning_rules": [r.to_dict() for r in self.cleaning_rules],
            "window_s": self.window_s,
            "masked_sensors": sorted(self.masked_sensors),
            "tree_params": self.tree_params.to_dict(),
            "min_train_days": self.min_train_days,
            "timeline_resolution_s": self.timeline_resolution_s,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if "dataset_id" not in d:
            raise ValueError("config needs a dataset_id")
        return cls(
            dataset_id=d["dataset_id"],
            resident_id=d.get("resident_id"),
            cleaning_rules=tuple(
                CleaningRule.from_dict(r) for r in d.get("cleaning_rules", [])
            ),
            window_s=float(d.get("window_s", 60.0)),
            masked_sensors=frozenset(d.get("masked_sensors", [])),
            tree_params=TreeParams.from_dict(d.get("tree_params", {})),
            min_train_days=int(d.get("min_train_days", 1)),
            timeline_resolution_s=float(d.get("timeline_resolution_s", 1.0)),
            notes=d.get("notes", ""),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))
