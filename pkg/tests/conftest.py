from __future__ import annotations

from pathlib import Path

import pytest

from flowar.ingest import ingest_ordonez
from flowar.model import (
    ActivityAnnotation,
    ActivityMeta,
    Dataset,
    SensorEvent,
    SensorMeta,
    canonicalize,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
RAW_DIR = REPO_ROOT / "data" / "raw"

HOME_A = ("home_a", RAW_DIR / "home_a_sensors.txt", RAW_DIR / "home_a_adls.txt")
HOME_B = ("home_b", RAW_DIR / "home_b_sensors.txt", RAW_DIR / "home_b_adls.txt")
DEMO_TZ = "Europe/Madrid"


def make_dataset(
    events=(),
    annotations=(),
    sensors=None,
    activities=None,
    residents=("r1",),
    name="toy",
    timezone="UTC",
) -> Dataset:
    """Small-dataset builder; catalogs default to whatever the records use."""
    if sensors is None:
        ids = sorted({e.sensor_id for e in events})
        sensors = tuple(SensorMeta(s, s) for s in ids)
    if activities is None:
        ids = sorted({a.activity_id for a in annotations})
        activities = tuple(ActivityMeta(a, a) for a in ids)
    return canonicalize(
        Dataset(
            name=name,
            timezone=timezone,
            sensors=tuple(sensors),
            activities=tuple(activities),
            residents=tuple(residents),
            events=tuple(events),
            annotations=tuple(annotations),
        )
    )


def ev(event_id, sensor, start, end):
    return SensorEvent(event_id, sensor, start, end)


def ann(annotation_id, activity, start, end, resident="r1"):
    return ActivityAnnotation(annotation_id, resident, activity, start, end)


@pytest.fixture(scope="session")
def dataset_a():
    name, sensors, adls = HOME_A
    ds, _ = ingest_ordonez(sensors, adls, name=name, tz=DEMO_TZ)
    return ds


@pytest.fixture(scope="session")
def dataset_b():
    name, sensors, adls = HOME_B
    ds, _ = ingest_ordonez(sensors, adls, name=name, tz=DEMO_TZ)
    return ds


@pytest.fixture()
def data_root(tmp_path, dataset_a, dataset_b):
    """Filesystem data root with both demo homes saved in uniform form."""
    from flowar.model import save_uniform

    root = tmp_path / "data"
    save_uniform(dataset_a, root / "home_a")
    save_uniform(dataset_b, root / "home_b")
    return root
