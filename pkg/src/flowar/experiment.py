"""Config-driven orchestration: load → clean → segment → featurize →
cross-validate, with immutable on-disk run records.

A run directory holds::

    runs/<run_id>/
        config.json            the exact configuration
        status.json            pending | running | done | failed (atomic writes)
        cleaning_report.json
        folds/<date>.json      one FoldResult per test day
        tree_<date>.txt        rendered decision tree per fold
        summary.json           aggregate metrics (no run id / timestamps,
                               so identical config + data give identical bytes)

Every JSON file is written atomically (temp file + rename): a reader never
observes a half-written document.
"""

from __future__ import annotations

import json
import os
import secrets
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .classifier import render_tree
from .cleaning import apply_rules
from .config import ExperimentConfig
from .errors import (
    CorruptRunFile,
    DatasetNotFound,
    FlowarError,
    IncomparableRuns,
    RunNotFound,
)
from .evaluation import RunSummary, evaluate_cv
from .model import Dataset, load_uniform

STATUSES = ("pending", "running", "done", "failed")


@dataclass
class RunRecord:
    run_id: str
    status: str
    created_at: str
    config: ExperimentConfig
    completed_folds: int = 0
    total_folds: int = 0
    error: str | None = None
    summary: dict | None = None  # summary.json contents when done

    def to_status_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "status": self.status,
            "created_at": self.created_at,
            "completed_folds": self.completed_folds,
            "total_folds": self.total_folds,
            "error": self.error,
        }


def write_json_atomic(path: Path, payload: dict) -> None:
    """Write-temp-then-rename so readers never see partial documents."""
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def new_run_id() -> str:
    return secrets.token_hex(16)  # 128 random bits


def dataset_dir(data_root: str | Path, dataset_id: str) -> Path:
    return Path(data_root) / dataset_id


def load_dataset(data_root: str | Path, dataset_id: str) -> Dataset:
    d = dataset_dir(data_root, dataset_id)
    if not (d / "dataset.meta").is_file():
        raise DatasetNotFound(f"no dataset {dataset_id!r} under {data_root}")
    return load_uniform(d)


def list_datasets(data_root: str | Path) -> list[str]:
    root = Path(data_root)
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir() if (p / "dataset.meta").is_file())


def prepare_run(
    config: ExperimentConfig, out_root: str | Path, run_id: str | None = None
) -> RunRecord:
    """Create the run directory in pending state (immediately observable)."""
    run_id = run_id or new_run_id()
    run_dir = Path(out_root) / run_id
    run_dir.mkdir(parents=True, exist_ok=False)
    created = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z"

    record = RunRecord(
        run_id=run_id,
        status="pending",
        created_at=created,
        config=config,
    )
    (run_dir / "config.json").write_text(config.to_json(), encoding="utf-8")
    write_json_atomic(run_dir / "status.json", record.to_status_dict())
    return record


def run_experiment(
    config: ExperimentConfig,
    data_root: str | Path,
    out_root: str | Path,
    run_id: str | None = None,
) -> RunRecord:
    """Execute the full pipeline, persisting state after every fold.

    Pipeline errors mark the run failed (with the reason persisted) instead
    of leaving a corrupt directory; the record is returned either way.
    """
    record = prepare_run(config, out_root, run_id)
    return execute_prepared(record, data_root, out_root)


def execute_prepared(
    record: RunRecord, data_root: str | Path, out_root: str | Path
) -> RunRecord:
    """Run the pipeline for an already-prepared (pending) run directory."""
    run_dir = Path(out_root) / record.run_id
    config = record.config
    try:
        dataset = load_dataset(data_root, config.dataset_id)
        events, cleaning_report = apply_rules(
            list(dataset.events),
            list(config.cleaning_rules),
            known_sensors=set(dataset.sensor_ids()),
        )
        dataset = replace(dataset, events=tuple(events))
        write_json_atomic(run_dir / "cleaning_report.json", cleaning_report.to_dict())

        (run_dir / "folds").mkdir(exist_ok=True)

        def on_progress(done: int, total: int) -> None:
            record.status = "running"
            record.completed_folds = done
            record.total_folds = total
            write_json_atomic(run_dir / "status.json", record.to_status_dict())

        record.status = "running"
        write_json_atomic(run_dir / "status.json", record.to_status_dict())

        summary = evaluate_cv(dataset, config, progress_sink=on_progress)

        for fold in summary.folds:
            day = fold.test_day.isoformat()
            write_json_atomic(run_dir / "folds" / f"{day}.json", fold.to_dict())
            (run_dir / f"tree_{day}.txt").write_text(
                render_tree(fold.model), encoding="utf-8"
            )

        summary_doc = _summary_doc(summary, config)
        write_json_atomic(run_dir / "summary.json", summary_doc)

        record.status = "done"
        record.total_folds = len(summary.folds)
        record.completed_folds = len(summary.folds)
        record.summary = summary_doc
        write_json_atomic(run_dir / "status.json", record.to_status_dict())
        return record
    except (FlowarError, OSError, ValueError, KeyError) as exc:
        record.status = "failed"
        record.error = f"{type(exc).__name__}: {exc}"
        write_json_atomic(run_dir / "status.json", record.to_status_dict())
        return record


def _summary_doc(summary: RunSummary, config: ExperimentConfig) -> dict:
    doc = summary.to_dict()
    doc["config"] = config.to_dict()
    return doc


def load_run(out_root: str | Path, run_id: str) -> RunRecord:
    """Reconstruct a run record from disk; partial runs load as-is."""
    run_dir = Path(out_root) / run_id
    if not run_dir.is_dir():
        raise RunNotFound(f"no run {run_id!r} under {out_root}")
    try:
        status = json.loads((run_dir / "status.json").read_text(encoding="utf-8"))
        config = ExperimentConfig.from_json(
            (run_dir / "config.json").read_text(encoding="utf-8")
        )
    except FileNotFoundError as exc:
        raise CorruptRunFile(f"run {run_id}: missing {exc.filename}") from exc
    except (json.JSONDecodeError, ValueError) as exc:
        raise CorruptRunFile(f"run {run_id}: {exc}") from exc

    summary = None
    summary_path = run_dir / "summary.json"
    if summary_path.is_file():
        try:
            summary = json.loads(summary_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptRunFile(f"run {run_id}: bad summary.json: {exc}") from exc

    return RunRecord(
        run_id=status.get("run_id", run_id),
        status=status.get("status", "failed"),
        created_at=status.get("created_at", ""),
        config=config,
        completed_folds=status.get("completed_folds", 0),
        total_folds=status.get("total_folds", 0),
        error=status.get("error"),
        summary=summary,
    )


def list_runs(out_root: str | Path) -> list[RunRecord]:
    root = Path(out_root)
    if not root.is_dir():
        return []
    records = []
    for p in sorted(root.iterdir()):
        if (p / "status.json").is_file():
            records.append(load_run(root, p.name))
    records.sort(key=lambda r: (r.created_at, r.run_id))
    return records


def load_fold(out_root: str | Path, run_id: str, day: str) -> dict:
    run_dir = Path(out_root) / run_id
    if not run_dir.is_dir():
        raise RunNotFound(f"no run {run_id!r} under {out_root}")
    path = run_dir / "folds" / f"{day}.json"
    if not path.is_file():
        raise RunNotFound(f"run {run_id} has no fold {day}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorruptRunFile(f"run {run_id}, fold {day}: {exc}") from exc


def load_tree_text(out_root: str | Path, run_id: str, day: str) -> str:
    run_dir = Path(out_root) / run_id
    path = run_dir / f"tree_{day}.txt"
    if not path.is_file():
        raise RunNotFound(f"run {run_id} has no tree for {day}")
    return path.read_text(encoding="utf-8")


def compare_runs(a: RunRecord, b: RunRecord) -> dict:
    """Per-metric deltas (b minus a) and the config diff between two runs."""
    if a.status != "done" or b.status != "done":
        raise IncomparableRuns("both runs must be done")
    if a.config.dataset_id != b.config.dataset_id:
        raise IncomparableRuns(
            f"different datasets: {a.config.dataset_id!r} vs {b.config.dataset_id!r}"
        )
    sa, sb = a.summary or {}, b.summary or {}

    def delta(key: str) -> float:
        return sb.get(key, 0.0) - sa.get(key, 0.0)

    per_class = {}
    classes = set(sa.get("per_class_mean_f1", {})) | set(sb.get("per_class_mean_f1", {}))
    for c in sorted(classes):
        per_class[c] = sb.get("per_class_mean_f1", {}).get(c, 0.0) - sa.get(
            "per_class_mean_f1", {}
        ).get(c, 0.0)

    event_deltas = {}
    keys = set(sa.get("event_error_totals", {})) | set(sb.get("event_error_totals", {}))
    for k in sorted(keys):
        event_deltas[k] = sb.get("event_error_totals", {}).get(k, 0) - sa.get(
            "event_error_totals", {}
        ).get(k, 0)

    config_diff = {}
    da, db = a.config.to_dict(), b.config.to_dict()
    for key in sorted(set(da) | set(db)):
        if da.get(key) != db.get(key):
            config_diff[key] = {"a": da.get(key), "b": db.get(key)}

    return {
        "run_a": a.run_id,
        "run_b": b.run_id,
        "dataset_id": a.config.dataset_id,
        "deltas": {
            "mean_micro_f1": delta("mean_micro_f1"),
            "mean_macro_f1": delta("mean_macro_f1"),
            "per_class_f1": per_class,
            "event_errors": event_deltas,
        },
        "config_diff": config_diff,
    }
