"""Workbench for human-activity recognition from binary sensor streams."""

from ._backend import BACKEND
from .config import ExperimentConfig
from .model import (
    IDLE,
    ActivityAnnotation,
    ActivityMeta,
    Dataset,
    SensorEvent,
    SensorMeta,
    StatsReport,
    explore_stats,
    load_uniform,
    save_uniform,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "ActivityAnnotation",
    "ActivityMeta",
    "BACKEND",
    "Dataset",
    "ExperimentConfig",
    "IDLE",
    "SensorEvent",
    "SensorMeta",
    "StatsReport",
    "explore_stats",
    "load_uniform",
    "save_uniform",
    "validate",
    "__version__",
]
