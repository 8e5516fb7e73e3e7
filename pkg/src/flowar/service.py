"""HTTP/JSON facade over datasets, stats, and runs.

All routes live under ``/api`` and return JSON.  Errors use a fixed shape
``{"code": ..., "message": ...}`` with a matching HTTP status.  Reads are
side-effect-free; ``POST /api/runs`` returns 202 immediately and executes
the run on a background thread (clients poll the status document, which is
written atomically after every fold).
"""

from __future__ import annotations

import threading
from datetime import date, datetime, timedelta
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import experiment
from .config import ExperimentConfig
from .errors import (
    CorruptRunFile,
    DatasetNotFound,
    FlowarError,
    IncomparableRuns,
    RunNotFound,
)
from .model import Dataset, explore_stats, format_rfc3339_ms, span_days
from .experiment import (
    compare_runs,
    execute_prepared,
    list_datasets,
    list_runs,
    load_dataset,
    load_fold,
    load_run,
    load_tree_text,
    prepare_run,
)


class ApiException(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


_ERROR_STATUS = {
    DatasetNotFound: (404, "DatasetNotFound"),
    RunNotFound: (404, "RunNotFound"),
    CorruptRunFile: (500, "CorruptRunFile"),
    IncomparableRuns: (409, "IncomparableRuns"),
}


def _to_api_exception(exc: Exception) -> ApiException:
    for etype, (status, code) in _ERROR_STATUS.items():
        if isinstance(exc, etype):
            return ApiException(status, code, str(exc))
    if isinstance(exc, (FlowarError, ValueError, KeyError)):
        return ApiException(400, "InvalidRequest", str(exc))
    return ApiException(500, "Internal", str(exc))


def _dataset_summary(data_root: Path, dataset_id: str, ds: Dataset) -> dict:
    return {
        "id": dataset_id,
        "name": ds.name,
        "days": span_days(ds),
        "sensors": len(ds.sensors),
        "activities": len(ds.activities),
        "events": len(ds.events),
        "annotations": len(ds.annotations),
    }


def create_app(data_root: str | Path, runs_root: str | Path) -> FastAPI:
    data_root = Path(data_root)
    runs_root = Path(runs_root)
    runs_root.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="flowar", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiException)
    async def handle_api_exception(_req: Request, exc: ApiException):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(FlowarError)
    async def handle_domain_error(_req: Request, exc: FlowarError):
        api = _to_api_exception(exc)
        return JSONResponse(
            status_code=api.status, content={"code": api.code, "message": api.message}
        )

    def get_dataset(dataset_id: str) -> Dataset:
        try:
            return load_dataset(data_root, dataset_id)
        except Exception as exc:
            raise _to_api_exception(exc) from exc

    @app.get("/api/datasets")
    def datasets():
        out = []
        for did in list_datasets(data_root):
            out.append(_dataset_summary(data_root, did, get_dataset(did)))
        return out

    @app.get("/api/datasets/{dataset_id}")
    def dataset_detail(dataset_id: str):
        ds = get_dataset(dataset_id)
        body = _dataset_summary(data_root, dataset_id, ds)
        body.update(
            {
                "timezone": ds.timezone,
                "residents": list(ds.residents),
                "sensor_catalog": [
                    {
                        "sensor_id": s.sensor_id,
                        "label": s.label,
                        "location": s.location,
                        "kind": s.kind,
                    }
                    for s in ds.sensors
                ],
                "activity_catalog": [
                    {"activity_id": a.activity_id, "label": a.label}
                    for a in ds.activities
                ],
            }
        )
        return body

    @app.get("/api/datasets/{dataset_id}/stats")
    def dataset_stats(dataset_id: str):
        return explore_stats(get_dataset(dataset_id)).to_dict()

    @app.get("/api/datasets/{dataset_id}/timeline")
    def dataset_timeline(dataset_id: str, day: str):
        ds = get_dataset(dataset_id)
        try:
            d = date.fromisoformat(day)
        except ValueError as exc:
            raise ApiException(400, "InvalidRequest", f"bad day {day!r}") from exc
        tz = ds.tzinfo()
        start = int(datetime(d.year, d.month, d.day, tzinfo=tz).timestamp() * 1000)
        next_day = d + timedelta(days=1)
        end = int(
            datetime(next_day.year, next_day.month, next_day.day, tzinfo=tz).timestamp()
            * 1000
        )
        events = [
            {
                "event_id": e.event_id,
                "sensor_id": e.sensor_id,
                "start": format_rfc3339_ms(e.start),
                "end": format_rfc3339_ms(e.end),
            }
            for e in ds.events
            if e.start < end and (e.end > start or (e.start == e.end >= start))
        ]
        annotations = [
            {
                "annotation_id": a.annotation_id,
                "resident_id": a.resident_id,
                "activity_id": a.activity_id,
                "start": format_rfc3339_ms(a.start),
                "end": format_rfc3339_ms(a.end),
            }
            for a in ds.annotations
            if a.start < end and a.end > start
        ]
        return {"day": day, "events": events, "annotations": annotations}

    @app.post("/api/runs", status_code=202)
    def create_run(body: dict):
        try:
            config = ExperimentConfig.from_dict(body)
        except (ValueError, KeyError, TypeError) as exc:
            raise ApiException(400, "InvalidConfig", str(exc)) from exc
        record = prepare_run(config, runs_root)
        thread = threading.Thread(
            target=execute_prepared,
            args=(record, data_root, runs_root),
            daemon=True,
            name=f"run-{record.run_id[:8]}",
        )
        thread.start()
        return {"run_id": record.run_id}

    @app.get("/api/runs")
    def runs():
        return [r.to_status_dict() for r in list_runs(runs_root)]

    @app.get("/api/runs/{run_id}")
    def run_detail(run_id: str):
        record = load_run(runs_root, run_id)
        body = record.to_status_dict()
        body["config"] = record.config.to_dict()
        if record.summary is not None:
            body["summary"] = record.summary
        return body

    @app.get("/api/runs/{run_id}/folds/{day}")
    def run_fold(run_id: str, day: str):
        return load_fold(runs_root, run_id, day)

    @app.get("/api/runs/{run_id}/tree/{day}", response_class=PlainTextResponse)
    def run_tree(run_id: str, day: str):
        return load_tree_text(runs_root, run_id, day)

    @app.get("/api/runs/{run_a}/compare/{run_b}")
    def run_compare(run_a: str, run_b: str):
        a = load_run(runs_root, run_a)
        b = load_run(runs_root, run_b)
        return compare_runs(a, b)

    return app


def serve(
    addr: str,
    data_root: str | Path,
    runs_root: str | Path,
    ui_dir: str | Path | None = None,
) -> None:
    """Run the service until interrupted.  ``addr`` is ``host:port``."""
    import uvicorn

    app = create_app(data_root, runs_root)
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    host, _, port = addr.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or "8080"), log_level="warning")
