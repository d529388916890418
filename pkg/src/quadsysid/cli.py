"""Command line entry points.

Exit codes: 0 success; 1 unexpected error; 2 bad config or arguments; then
one code per pipeline stage: 3 ingest, 4 segments, 5 sweep, 6 roll_pitch,
7 yaw, 8 hover, 9 validate.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ._version import __version__
from .csvlog import write_dataset_csv
from .errors import PipelineError, SysIdError, UnknownLabel
from .motor import sweep_time_constant
from .pipeline import (PLOT_KINDS, PipelineConfig, dump_json, export_plot_data,
                       run_pipeline)
from .sim import (BUILTIN_SCRIPTS, ExcitationScript, crazyflie_params, run_script,
                  standard_suite)
from .ulog import write_dataset_ulog

STAGE_EXIT_CODES = {
    "config": 2,
    "ingest": 3,
    "segments": 4,
    "sweep": 5,
    "roll_pitch": 6,
    "yaw": 7,
    "hover": 8,
    "validate": 9,
}


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_config(path: str) -> PipelineConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ValueError(f"cannot read config {path}: {e}")
    except json.JSONDecodeError as e:
        raise ValueError(f"config {path} is not valid JSON: {e}")
    return PipelineConfig.from_dict(raw)


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_identify(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args.config)
    except ValueError as e:
        return _fail(str(e), STAGE_EXIT_CODES["config"])
    try:
        report = run_pipeline(config, args.logs)
    except PipelineError as e:
        return _fail(str(e), STAGE_EXIT_CODES.get(e.stage, 1))
    except OSError as e:
        return _fail(f"cannot read log: {e}", STAGE_EXIT_CODES["ingest"])
    _write_text(dump_json(report.to_json_dict()), args.out)
    if args.plots_dir is not None:
        plots_dir = Path(args.plots_dir)
        plots_dir.mkdir(parents=True, exist_ok=True)
        for kind in PLOT_KINDS:
            if kind in report.plots:
                (plots_dir / f"{kind}.csv").write_text(export_plot_data(report, kind),
                                                       encoding="utf-8")
    for line in report.warnings:
        print(f"warning: {line}", file=sys.stderr)
    return 0


def _resolve_script(name: str, config: PipelineConfig | None,
                    args: argparse.Namespace) -> list[ExcitationScript]:
    noise = dict(accel_sigma=args.accel_noise, gyro_sigma=args.gyro_noise)
    if name == "standard_suite":
        return standard_suite(seed=args.seed, **noise)
    defs = dict(config.scripts) if config is not None else {}
    if name in defs:
        params = dict(defs[name])
        kind = params.pop("type", name)
        if kind not in BUILTIN_SCRIPTS:
            raise UnknownLabel(f"script {name!r} has unknown type {kind!r}; "
                               f"builtins: {sorted(BUILTIN_SCRIPTS)}")
        built = BUILTIN_SCRIPTS[kind](**params)
    elif name in BUILTIN_SCRIPTS:
        built = BUILTIN_SCRIPTS[name]()
    else:
        raise UnknownLabel(f"unknown script {name!r}; builtins: "
                           f"{sorted(BUILTIN_SCRIPTS)}")
    if isinstance(built, list):
        # multi-script suites carry their own noise/seed parameters
        return built
    overrides = dict(noise, seed=args.seed)
    if args.duration is not None:
        overrides["duration"] = args.duration
    return [dataclasses.replace(built, **overrides)]


def cmd_simulate(args: argparse.Namespace) -> int:
    config = None
    if args.config is not None:
        try:
            config = _load_config(args.config)
        except ValueError as e:
            return _fail(str(e), STAGE_EXIT_CODES["config"])
    try:
        scripts = _resolve_script(args.script, config, args)
    except (UnknownLabel, TypeError) as e:
        return _fail(str(e), STAGE_EXIT_CODES["config"])
    params = crazyflie_params()
    try:
        ds = run_script(scripts, params, args.dt)
    except SysIdError as e:
        return _fail(str(e), 1)
    out = Path(args.out)
    if out.suffix.lower() == ".csv":
        out.write_text(write_dataset_csv(ds), encoding="utf-8")
    else:
        out.write_bytes(write_dataset_ulog(ds))
    labels = ",".join(label for label, _, _ in ds.segments)
    print(f"wrote {ds.n_samples} samples ({labels}) to {out}", file=sys.stderr)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        config = _load_config(args.config)
    except ValueError as e:
        return _fail(str(e), STAGE_EXIT_CODES["config"])
    # reuse the pipeline for ingestion and the sweep stage only
    trimmed = dataclasses.replace(
        config, segments=tuple(w for w in config.segments if w.label == "linear"))
    if not trimmed.segments:
        # no linear window configured: sweep the whole log
        from .pipeline import _parse_log  # late import keeps the public surface small
        from .resample import resample_sync
        try:
            blob = Path(args.log).read_bytes()
            log, eff = _parse_log(blob, trimmed.mapping)
            ds = resample_sync(log, eff, trimmed.resample_dt_s)
            est = sweep_time_constant(ds, trimmed.geometry, trimmed.sweep_grid,
                                      trimmed.lumped)
        except OSError as e:
            return _fail(f"cannot read log: {e}", STAGE_EXIT_CODES["ingest"])
        except SysIdError as e:
            return _fail(str(e), STAGE_EXIT_CODES["sweep"])
        curve = est.sweep_curve
        best = est.time_constant
    else:
        try:
            report = run_pipeline(trimmed, [args.log])
        except PipelineError as e:
            return _fail(str(e), STAGE_EXIT_CODES.get(e.stage, 1))
        except OSError as e:
            return _fail(f"cannot read log: {e}", STAGE_EXIT_CODES["ingest"])
        curve = report.plots["sweep"]
        best = report.motor.time_constant
    if args.format == "csv":
        lines = ["t_m_s,rmse"]
        lines += [f"{repr(float(t))},{repr(float(r))}" for t, r in curve]
        _write_text("\n".join(lines) + "\n", args.out)
    else:
        _write_text(dump_json({"schema_version": "1", "best_t_m_s": float(best),
                               "sweep": [[float(t), float(r)] for t, r in curve]}),
                    args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.workspace), max_upload_bytes=args.max_upload_bytes,
                     frontend_dir=Path(args.frontend) if args.frontend else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadsysid",
        description="Identify quadrotor motor and inertia parameters from flight logs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("identify", help="run the full pipeline and print the report")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("logs", nargs="+", help="ULog or CSV flight logs")
    p.add_argument("--out", default=None, help="report path (default stdout)")
    p.add_argument("--plots-dir", default=None, help="also write plot CSVs here")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("simulate", help="synthesize a flight log from a script")
    p.add_argument("--script", required=True,
                   help=f"{sorted(BUILTIN_SCRIPTS)} or 'standard_suite' or a config-defined script")
    p.add_argument("--out", required=True, help=".ulg or .csv output path")
    p.add_argument("--config", default=None, help="config JSON with a scripts section")
    p.add_argument("--dt", type=float, default=0.001, help="sample period s")
    p.add_argument("--duration", type=float, default=None, help="override script duration s")
    p.add_argument("--accel-noise", type=float, default=0.0, help="accel noise sigma m/s^2")
    p.add_argument("--gyro-noise", type=float, default=0.0, help="gyro noise sigma rad/s")
    p.add_argument("--seed", type=int, default=0, help="noise seed")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="export the delay sweep curve for one log")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("log", help="ULog or CSV flight log")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("serve", help="run the HTTP identification service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--workspace", required=True, help="upload/report storage directory")
    p.add_argument("--max-upload-bytes", type=int, default=64 * 1024 * 1024)
    p.add_argument("--frontend", default=None, help="static frontend directory to serve")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SysIdError as e:
        return _fail(str(e), 1)


if __name__ == "__main__":
    sys.exit(main())
