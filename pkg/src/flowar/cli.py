"""Command-line interface: ingest, run, report, stats, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import ExperimentConfig
from .experiment import (
    compare_runs,
    load_dataset,
    load_run,
    load_tree_text,
    run_experiment,
)
from .ingest import ingest_ordonez
from .model import explore_stats, save_uniform


@click.group()
def main() -> None:
    """Workbench for activity recognition from binary sensors."""


@main.command("ingest")
@click.option("--format", "fmt", type=click.Choice(["ordonez"]), required=True)
@click.option("--sensors", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--annotations", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--name", required=True)
@click.option("--tz", required=True, help="IANA timezone of the raw wall-clock timestamps")
@click.option("--out", type=click.Path(file_okay=False), required=True)
def ingest_cmd(fmt: str, sensors: str, annotations: str, name: str, tz: str, out: str) -> None:
    """Parse raw interval tables into a uniform dataset directory."""
    dataset, report = ingest_ordonez(sensors, annotations, name=name, tz=tz)
    save_uniform(dataset, out)
    click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))


@main.command("run")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--data", "data_root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "out_root", type=click.Path(file_okay=False), required=True)
def run_cmd(config_path: str, data_root: str, out_root: str) -> None:
    """Execute one experiment and persist the run directory."""
    config = ExperimentConfig.from_json(Path(config_path).read_text(encoding="utf-8"))
    record = run_experiment(config, data_root, out_root)
    body = record.to_status_dict()
    if record.status == "done" and record.summary:
        body["mean_micro_f1"] = record.summary["mean_micro_f1"]
        body["mean_macro_f1"] = record.summary["mean_macro_f1"]
    click.echo(json.dumps(body, indent=2, sort_keys=True))
    if record.status != "done":
        sys.exit(1)


@main.command("report")
@click.option("--run", "run_id", required=True)
@click.option("--runs", "runs_root", type=click.Path(exists=True, file_okay=False), default="runs")
@click.option("--compare", "compare_id", default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def report_cmd(run_id: str, runs_root: str, compare_id: str | None, out_path: str) -> None:
    """Emit a run's summary, rendered trees, and optional comparison."""
    record = load_run(runs_root, run_id)
    body: dict = record.to_status_dict()
    body["config"] = record.config.to_dict()
    body["summary"] = record.summary
    trees = {}
    if record.summary:
        for day in record.summary.get("per_fold", {}):
            trees[day] = load_tree_text(runs_root, run_id, day)
    body["trees"] = trees
    if compare_id:
        other = load_run(runs_root, compare_id)
        body["comparison"] = compare_runs(record, other)
    Path(out_path).write_text(
        json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(out_path)


@main.command("stats")
@click.option("--dataset", "dataset_id", required=True)
@click.option("--data", "data_root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def stats_cmd(dataset_id: str, data_root: str, out_path: str) -> None:
    """Write a dataset's exploration statistics as JSON."""
    ds = load_dataset(data_root, dataset_id)
    report = explore_stats(ds)
    Path(out_path).write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(out_path)


@main.command("serve")
@click.option("--addr", default="127.0.0.1:8080", show_default=True)
@click.option("--data", "data_root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--runs", "runs_root", type=click.Path(file_okay=False), required=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None)
def serve_cmd(addr: str, data_root: str, runs_root: str, ui_dir: str | None) -> None:
    """Serve the HTTP/JSON API (and optionally a built web UI)."""
    from .service import serve

    serve(addr, data_root, runs_root, ui_dir)


if __name__ == "__main__":
    main()
