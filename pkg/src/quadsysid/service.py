"""Local HTTP interface around the identification pipeline.

State is a directory tree under the workspace: uploads in logs/ named by
content digest, finished reports in reports/, plot CSVs in plots/. Nothing
else persists, so restarts are harmless.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import Body, FastAPI, HTTPException, Response, UploadFile
from fastapi.responses import PlainTextResponse

from ._version import __version__
from .csvlog import csv_inventory
from .errors import MagicMismatch, PipelineError, SysIdError
from .pipeline import (PLOT_KINDS, SCHEMA_VERSION, PipelineConfig, dump_json,
                       export_plot_data, run_pipeline)
from .types import RawLog
from .ulog import ULOG_MAGIC, parse_ulog

PREVIEW_POINTS = 600


def _inventory(log: RawLog) -> dict:
    channels = []
    t_lo, t_hi = np.inf, -np.inf
    preview = {}
    for name in sorted(log.channels):
        ts, values = log.channels[name]
        if len(ts):
            t_lo = min(t_lo, float(ts[0]))
            t_hi = max(t_hi, float(ts[-1]))
        fields = log.field_names(name) or [str(j) for j in range(values.shape[1])]
        channels.append({
            "name": name,
            "fields": fields,
            "samples": int(len(ts)),
            "t_start_s": float(ts[0]) if len(ts) else None,
            "t_end_s": float(ts[-1]) if len(ts) else None,
        })
        stride = max(1, -(-len(ts) // PREVIEW_POINTS))
        preview[name] = {
            "t": [float(v) for v in ts[::stride]],
            "values": [[float(v) for v in col] for col in values[::stride].T],
        }
    duration = max(t_hi - t_lo, 0.0) if channels and np.isfinite(t_hi) else 0.0
    return {"channels": channels, "duration_s": duration, "preview": preview}


def create_app(workspace: Path, max_upload_bytes: int = 64 * 1024 * 1024,
               frontend_dir: Optional[Path] = None) -> FastAPI:
    workspace = Path(workspace)
    logs_dir = workspace / "logs"
    reports_dir = workspace / "reports"
    plots_dir = workspace / "plots"
    for d in (logs_dir, reports_dir, plots_dir):
        d.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="quadsysid", version=__version__)

    def _detail(status: int, message: str, **extra) -> HTTPException:
        return HTTPException(status, {"schema_version": SCHEMA_VERSION,
                                      "message": message, **extra})

    @app.post("/api/logs")
    async def upload_log(file: UploadFile):
        blob = await file.read()
        if len(blob) > max_upload_bytes:
            raise _detail(413, f"upload of {len(blob)} bytes exceeds the "
                               f"{max_upload_bytes} byte cap")
        try:
            if blob[:len(ULOG_MAGIC)] == ULOG_MAGIC:
                log = parse_ulog(blob)
            elif not blob:
                # 0 bytes is neither format; report a magic failure, not a CSV one
                raise MagicMismatch("upload is empty (0 bytes)")
            else:
                log = csv_inventory(blob.decode("utf-8"))
        except (SysIdError, UnicodeDecodeError, ValueError) as e:
            raise _detail(400, f"cannot parse upload ({len(blob)} bytes): "
                               f"{type(e).__name__}: {e}")
        digest = hashlib.sha256(blob).hexdigest()
        (logs_dir / digest).write_bytes(blob)
        (logs_dir / f"{digest}.meta.json").write_text(
            json.dumps({"name": file.filename or digest}), encoding="utf-8")
        inv = _inventory(log)
        return {"schema_version": SCHEMA_VERSION, "log_id": digest,
                "name": file.filename or digest, "size_bytes": len(blob), **inv}

    def _load_blob(log_id: str) -> tuple[str, bytes]:
        path = logs_dir / log_id
        if not log_id or "/" in log_id or not path.is_file():
            raise _detail(404, f"unknown log id {log_id!r}")
        meta = logs_dir / f"{log_id}.meta.json"
        name = log_id
        if meta.is_file():
            name = json.loads(meta.read_text(encoding="utf-8")).get("name", log_id)
        return name, path.read_bytes()

    @app.post("/api/identify")
    async def identify(payload: dict = Body(...)):
        if not isinstance(payload, dict):
            raise _detail(400, "body must be an object")
        ids = payload.get("log_ids")
        if ids is None:
            one = payload.get("log_id")
            ids = [one] if one is not None else None
        if not ids or not isinstance(ids, list):
            raise _detail(400, "body needs 'log_id' or a non-empty 'log_ids' list")
        try:
            config = PipelineConfig.from_dict(payload.get("config", {}))
        except ValueError as e:
            raise _detail(400, f"malformed config: {e}")
        inputs = [_load_blob(str(i)) for i in ids]
        try:
            report = run_pipeline(config, inputs)
        except PipelineError as e:
            raise _detail(422, str(e), stage=e.stage)
        report_path = reports_dir / f"{report.report_id}.json"
        if not report_path.exists():
            # first writer wins; identical inputs produce the same id
            report_path.write_text(dump_json(report.to_json_dict()), encoding="utf-8")
            plot_dir = plots_dir / report.report_id
            plot_dir.mkdir(parents=True, exist_ok=True)
            for kind in PLOT_KINDS:
                if kind in report.plots:
                    (plot_dir / f"{kind}.csv").write_text(
                        export_plot_data(report, kind), encoding="utf-8")
        return Response(content=report_path.read_text(encoding="utf-8"),
                        media_type="application/json")

    @app.get("/api/report/{report_id}")
    async def get_report(report_id: str):
        path = reports_dir / f"{report_id}.json"
        if "/" in report_id or not path.is_file():
            raise _detail(404, f"unknown report id {report_id!r}")
        return Response(content=path.read_text(encoding="utf-8"),
                        media_type="application/json")

    @app.get("/api/plot/{report_id}/{which}")
    async def get_plot(report_id: str, which: str):
        if which not in PLOT_KINDS:
            raise _detail(404, f"unknown plot kind {which!r}; have {list(PLOT_KINDS)}")
        path = plots_dir / report_id / f"{which}.csv"
        if "/" in report_id or not path.is_file():
            raise _detail(404, f"no {which!r} series for report {report_id!r}")
        return PlainTextResponse(path.read_text(encoding="utf-8"), media_type="text/csv")

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
