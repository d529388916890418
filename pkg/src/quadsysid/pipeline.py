"""End-to-end identification: config + log files in, report + plot data out."""

from __future__ import annotations

import dataclasses
import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ._version import __version__
from .csvlog import parse_crazyflie_csv, positional_mapping
from .errors import (MagicMismatch, NoRealRoot, PipelineError, SeriesUnavailable,
                     SysIdError, TooShort)
from .inertia import (C_XY_Z_DEFAULT, AngularDataset, InertiaEstimate, angular_acceleration,
                      assemble_inertia_estimate, fit_k_tau, fit_roll_pitch, fit_yaw_ratio,
                      positional_torques, predict_izz, smooth_series, yaw_drive)
from .motor import (HoverStats, MotorModelEstimate, hover_analysis, predict_thrust,
                    simulate_motor_speeds, sweep_time_constant, transient_skip)
from .resample import resample_sync, slice_dataset
from .sim import QuadrotorParams, validate
from .types import (ChannelMapping, ChannelSpec, RawLog, RigidBodyGeometry, SysIdDataset,
                    crazyflie_geometry, default_channel_mapping)
from .ulog import ULOG_MAGIC, parse_ulog

SCHEMA_VERSION = "1"

# segment labels the pipeline stages consume
SEGMENT_LABELS = ("linear", "roll_pitch", "yaw")

LogInput = Union[str, Path, tuple]


@dataclass(frozen=True)
class SegmentWindow:
    """Absolute time window [start_s, end_s) of one maneuver in one log."""
    label: str
    log: int
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.log < 0:
            raise ValueError(f"segment {self.label!r}: log index must be >= 0")
        if not self.end_s > self.start_s:
            raise ValueError(f"segment {self.label!r}: end_s must exceed start_s")


@dataclass(frozen=True)
class PipelineConfig:
    geometry: RigidBodyGeometry = field(default_factory=crazyflie_geometry)
    mapping: ChannelMapping = field(default_factory=default_channel_mapping)
    segments: tuple = ()
    sweep_t_min_s: float = 0.001
    sweep_t_max_s: float = 1.0
    sweep_points: int = 200
    resample_dt_s: float = 0.001
    lumped: bool = True
    reciprocal: bool = False
    c_xy_z: float = C_XY_Z_DEFAULT
    gyro_filter_window_s: float = 0.005
    hover_percentile: float = 0.05
    use_logged_angular_accel: bool = False
    scripts: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.sweep_t_min_s < self.sweep_t_max_s:
            raise ValueError("sweep bounds must satisfy 0 < t_min_s < t_max_s")
        if self.sweep_points < 2:
            raise ValueError("sweep needs at least 2 points")
        if not self.resample_dt_s > 0.0:
            raise ValueError("resample_dt_s must be positive")
        if not 0.0 < self.hover_percentile <= 1.0:
            raise ValueError("hover_percentile must be in (0, 1]")
        if self.gyro_filter_window_s < 0.0:
            raise ValueError("gyro_filter_window_s must be >= 0")
        if not self.c_xy_z > 0.0:
            raise ValueError("c_xy_z must be positive")
        seen = [w.label for w in self.segments if w.label in SEGMENT_LABELS]
        if len(seen) != len(set(seen)):
            raise ValueError(f"duplicate segment labels: {sorted(seen)}")

    @property
    def sweep_grid(self) -> np.ndarray:
        return np.geomspace(self.sweep_t_min_s, self.sweep_t_max_s, self.sweep_points)

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        if not isinstance(d, dict):
            raise ValueError("config must be an object")
        known = {"geometry", "channels", "segments", "sweep", "options",
                 "resample_dt_s", "scripts"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")

        geometry = _geometry_from_dict(d.get("geometry"))
        mapping = _mapping_from_dict(d.get("channels"))
        segments = tuple(_segment_from_dict(s) for s in d.get("segments", []))

        sweep = d.get("sweep", {})
        if not isinstance(sweep, dict):
            raise ValueError("sweep must be an object")
        options = d.get("options", {})
        if not isinstance(options, dict):
            raise ValueError("options must be an object")
        extra = set(options) - {"lumped", "reciprocal", "c_xy_z", "gyro_filter_window_s",
                                "hover_percentile", "use_logged_angular_accel"}
        if extra:
            raise ValueError(f"unknown option keys: {sorted(extra)}")
        scripts = d.get("scripts", {})
        if not isinstance(scripts, dict):
            raise ValueError("scripts must be an object")
        try:
            return cls(
                geometry=geometry, mapping=mapping, segments=segments,
                sweep_t_min_s=float(sweep.get("t_min_s", 0.001)),
                sweep_t_max_s=float(sweep.get("t_max_s", 1.0)),
                sweep_points=int(sweep.get("points", 200)),
                resample_dt_s=float(d.get("resample_dt_s", 0.001)),
                lumped=bool(options.get("lumped", True)),
                reciprocal=bool(options.get("reciprocal", False)),
                c_xy_z=float(options.get("c_xy_z", C_XY_Z_DEFAULT)),
                gyro_filter_window_s=float(options.get("gyro_filter_window_s", 0.005)),
                hover_percentile=float(options.get("hover_percentile", 0.05)),
                use_logged_angular_accel=bool(options.get("use_logged_angular_accel", False)),
                scripts=dict(scripts),
            )
        except (TypeError, ValueError) as e:
            raise ValueError(f"invalid config: {e}")

    def to_dict(self) -> dict:
        g = self.geometry
        m = self.mapping
        return {
            "geometry": {
                "mass_kg": g.mass,
                "gravity_ms2": list(g.gravity),
                "rotor_positions_m": np.asarray(g.rotor_positions).tolist(),
                "rotor_force_axes": np.asarray(g.rotor_force_axes).tolist(),
                "rotor_torque_axes": np.asarray(g.rotor_torque_axes).tolist(),
            },
            "channels": {
                "accel": {"channel": m.accel.name, "fields": list(m.accel.fields)},
                "gyro": {"channel": m.gyro.name, "fields": list(m.gyro.fields)},
                "setpoint": {"channel": m.setpoint.name, "fields": list(m.setpoint.fields)},
                "setpoint_scale": list(m.setpoint_scale),
                "csv_time_scale": m.csv_time_scale,
            },
            "segments": [dataclasses.asdict(w) for w in self.segments],
            "sweep": {"t_min_s": self.sweep_t_min_s, "t_max_s": self.sweep_t_max_s,
                      "points": self.sweep_points},
            "resample_dt_s": self.resample_dt_s,
            "options": {
                "lumped": self.lumped, "reciprocal": self.reciprocal, "c_xy_z": self.c_xy_z,
                "gyro_filter_window_s": self.gyro_filter_window_s,
                "hover_percentile": self.hover_percentile,
                "use_logged_angular_accel": self.use_logged_angular_accel,
            },
            "scripts": self.scripts,
        }


def _geometry_from_dict(d: Optional[dict]) -> RigidBodyGeometry:
    if d is None:
        return crazyflie_geometry()
    if not isinstance(d, dict):
        raise ValueError("geometry must be an object")
    extra = set(d) - {"mass_kg", "gravity_ms2", "rotor_positions_m",
                      "rotor_force_axes", "rotor_torque_axes", "arm_m"}
    if extra:
        raise ValueError(f"unknown geometry keys: {sorted(extra)}")
    if "rotor_positions_m" not in d:
        # mass/arm overrides on the default frame
        base = crazyflie_geometry(mass=float(d.get("mass_kg", 0.027)),
                                  arm=float(d.get("arm_m", 0.0325)))
        if "gravity_ms2" in d:
            return dataclasses.replace(base, gravity=tuple(float(v) for v in d["gravity_ms2"]))
        return base
    try:
        return RigidBodyGeometry(
            mass=float(d["mass_kg"]),
            rotor_positions=np.asarray(d["rotor_positions_m"], dtype=np.float64),
            rotor_force_axes=np.asarray(d["rotor_force_axes"], dtype=np.float64),
            rotor_torque_axes=np.asarray(d["rotor_torque_axes"], dtype=np.float64),
            gravity=tuple(float(v) for v in d.get("gravity_ms2", (0.0, 0.0, -9.81))),
        )
    except KeyError as e:
        raise ValueError(f"geometry missing key {e.args[0]!r}")


def _mapping_from_dict(d: Optional[dict]) -> ChannelMapping:
    if d is None:
        return default_channel_mapping()
    if not isinstance(d, dict):
        raise ValueError("channels must be an object")
    extra = set(d) - {"accel", "gyro", "setpoint", "setpoint_scale", "csv_time_scale"}
    if extra:
        raise ValueError(f"unknown channel keys: {sorted(extra)}")

    def spec(key: str, default: ChannelSpec) -> ChannelSpec:
        sub = d.get(key)
        if sub is None:
            return default
        if not isinstance(sub, dict) or "channel" not in sub or "fields" not in sub:
            raise ValueError(f"channels.{key} needs 'channel' and 'fields'")
        fields = tuple(f if isinstance(f, str) else int(f) for f in sub["fields"])
        return ChannelSpec(str(sub["channel"]), fields)

    base = default_channel_mapping()
    scale = d.get("setpoint_scale", list(base.setpoint_scale))
    if not (isinstance(scale, (list, tuple)) and len(scale) == 2):
        raise ValueError("setpoint_scale must be [min, max]")
    tscale = d.get("csv_time_scale")
    return ChannelMapping(accel=spec("accel", base.accel), gyro=spec("gyro", base.gyro),
                          setpoint=spec("setpoint", base.setpoint),
                          setpoint_scale=(float(scale[0]), float(scale[1])),
                          csv_time_scale=None if tscale is None else float(tscale))


def _segment_from_dict(d: dict) -> SegmentWindow:
    if not isinstance(d, dict):
        raise ValueError("each segment must be an object")
    extra = set(d) - {"label", "log", "start_s", "end_s"}
    if extra:
        raise ValueError(f"unknown segment keys: {sorted(extra)}")
    try:
        return SegmentWindow(label=str(d["label"]), log=int(d.get("log", 0)),
                             start_s=float(d["start_s"]), end_s=float(d["end_s"]))
    except KeyError as e:
        raise ValueError(f"segment missing key {e.args[0]!r}")


def dump_json(obj) -> str:
    """Canonical serialization shared by the CLI and the service so both
    produce identical bytes for identical reports."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False,
                      allow_nan=False) + "\n"


@dataclass
class IdentificationReport:
    report_id: str
    created_utc: str
    motor: Optional[MotorModelEstimate]
    inertia: Optional[InertiaEstimate]
    inertia_partial: dict
    inertia_diagnostics: dict
    hover: Optional[HoverStats]
    validation: Optional[dict]
    provenance: dict
    warnings: list
    skipped: dict
    plots: dict = field(default_factory=dict, repr=False)

    def to_json_dict(self) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "report_id": self.report_id,
            "created_utc": self.created_utc,
            "warnings": list(self.warnings),
            "skipped": dict(self.skipped),
            "provenance": self.provenance,
        }
        if self.motor is not None:
            out["motor"] = {
                "time_constant_s": float(self.motor.time_constant),
                "fit_rmse_ms2": float(self.motor.fit_rmse),
                "lumped": bool(self.motor.curve.lumped),
                "thrust_coeffs_n": np.asarray(self.motor.curve.coeffs).tolist(),
            }
        inertia: dict = {}
        if self.inertia is not None:
            est = self.inertia
            inertia.update({
                "ixx_kg_m2": est.ixx, "iyy_kg_m2": est.iyy, "izz_kg_m2": est.izz,
                "k_tau_nm_per_n": est.k_tau, "yaw_ratio_kg_m": est.yaw_ratio,
                "c_xy_z": est.c_xy_z,
            })
        else:
            inertia.update({k: float(v) for k, v in self.inertia_partial.items()})
        if self.inertia_diagnostics:
            inertia["diagnostics"] = {k: float(v) for k, v in self.inertia_diagnostics.items()}
        if inertia:
            out["inertia"] = inertia
        if self.hover is not None:
            out["hover"] = {
                "percentile": float(self.hover.percentile),
                "mean_command": np.asarray(self.hover.mean_command).tolist(),
                "predicted_hover_command": float(self.hover.predicted_hover_command),
            }
        if self.validation is not None:
            out["validation"] = self.validation
        return out


@contextmanager
def _stage(name: str):
    try:
        yield
    except PipelineError:
        raise
    except (SysIdError, ValueError) as e:
        raise PipelineError(name, e)


def _normalize_inputs(inputs: Sequence[LogInput]) -> list[tuple[str, bytes]]:
    named = []
    for item in inputs:
        if isinstance(item, (str, Path)):
            p = Path(item)
            named.append((p.name, p.read_bytes()))
        else:
            name, blob = item
            named.append((str(name), bytes(blob)))
    if not named:
        raise ValueError("at least one log is required")
    return named


def _parse_log(blob: bytes, mapping: ChannelMapping) -> tuple[RawLog, ChannelMapping]:
    """ULog by magic, else text CSV; returns the mapping valid for the parse."""
    if blob[:len(ULOG_MAGIC)] == ULOG_MAGIC:
        return parse_ulog(blob), mapping
    if not blob:
        raise MagicMismatch("log is empty (0 bytes)")
    try:
        text = blob.decode("utf-8")
    except UnicodeDecodeError:
        raise MagicMismatch(f"log is neither a ULog (bad magic) nor UTF-8 text "
                            f"({len(blob)} bytes)")
    return parse_crazyflie_csv(text, mapping), positional_mapping(mapping)


def compute_report_id(digests: Sequence[str], config: PipelineConfig) -> str:
    h = hashlib.sha256()
    for d in digests:
        h.update(d.encode("ascii"))
        h.update(b"\n")
    h.update(dump_json(config.to_dict()).encode("utf-8"))
    return h.hexdigest()[:16]


def run_pipeline(config: PipelineConfig,
                 logs: Sequence[LogInput]) -> IdentificationReport:
    """Run every identification stage in order; any stage failure is raised
    as PipelineError carrying the stage name. Deterministic given inputs."""
    warnings: list[str] = []
    skipped: dict[str, str] = {}
    plots: dict = {}
    geom = config.geometry

    named = _normalize_inputs(logs)
    digests = [hashlib.sha256(blob).hexdigest() for _, blob in named]

    with _stage("ingest"):
        datasets = []
        for name, blob in named:
            log, eff_mapping = _parse_log(blob, config.mapping)
            dropped = int(log.metadata.get("dropped_out_of_order", "0"))
            if dropped:
                warnings.append(f"{name}: dropped {dropped} out-of-order samples")
            datasets.append(resample_sync(log, eff_mapping, config.resample_dt_s))

    with _stage("segments"):
        segs: dict[str, SysIdDataset] = {}
        for w in config.segments:
            if w.label not in SEGMENT_LABELS:
                warnings.append(f"segment label {w.label!r} is not used by the pipeline")
                continue
            if w.log >= len(datasets):
                raise ValueError(f"segment {w.label!r} references log {w.log}, "
                                 f"only {len(datasets)} provided")
            ds = datasets[w.log]
            a = max(int(round((w.start_s - ds.t0) / ds.dt)), 0)
            b = min(int(round((w.end_s - ds.t0) / ds.dt)), ds.n_samples)
            if b - a < 2:
                raise ValueError(f"segment {w.label!r} [{w.start_s}, {w.end_s}) s resolves "
                                 f"to {max(b - a, 0)} samples")
            segs[w.label] = slice_dataset(ds, a, b, w.label)
        if "linear" not in segs:
            raise ValueError("config must define a 'linear' segment")

    linear = segs["linear"]
    with _stage("sweep"):
        motor_est = sweep_time_constant(linear, geom, config.sweep_grid, config.lumped)
        warnings.extend(motor_est.warnings)
        t_hat = motor_est.time_constant
        plots["sweep"] = motor_est.sweep_curve

        speeds_lin = simulate_motor_speeds(linear.setpoints, t_hat, linear.dt,
                                           linear.setpoints[0])
        skip = transient_skip(t_hat, linear.dt, linear.n_samples)
        forces_lin = predict_thrust(motor_est.curve, speeds_lin)
        plots["thrust_fit"] = {
            "t": linear.times[skip:],
            "measured": geom.mass * linear.accel[skip:],
            "predicted": forces_lin[skip:] @ np.asarray(geom.rotor_force_axes),
        }

    # shared prep for the angular segments: reconstruct speeds at the best
    # delay, predict per-motor thrust, filter the gyro, differentiate
    angular: dict[str, tuple[AngularDataset, np.ndarray]] = {}
    for label in ("roll_pitch", "yaw"):
        if label not in segs:
            continue
        with _stage(label):
            sub = segs[label]
            sp = simulate_motor_speeds(sub.setpoints, t_hat, sub.dt, sub.setpoints[0])
            forces = predict_thrust(motor_est.curve, sp)
            window = max(1, int(round(config.gyro_filter_window_s / sub.dt)))
            gyro = smooth_series(sub.gyro, window)
            if config.use_logged_angular_accel and sub.angular_accel is not None:
                wd = np.asarray(sub.angular_accel, dtype=np.float64)
            else:
                wd = angular_acceleration(gyro, sub.dt)
            # drop the speed-reconstruction transient and the one-sided
            # difference rows at both ends
            lo = max(transient_skip(t_hat, sub.dt, sub.n_samples), 1)
            hi = sub.n_samples - 1
            if hi - lo < 4:
                raise TooShort(f"segment {label!r}: {max(hi - lo, 0)} samples left "
                               f"after transient trim")
            angular[label] = (AngularDataset(gyro=gyro[lo:hi], angular_accel=wd[lo:hi],
                                             forces=forces[lo:hi]),
                              sub.times[lo:hi])

    inertia_est: Optional[InertiaEstimate] = None
    partial: dict[str, float] = {}
    diags: dict[str, float] = {}
    angular_rows: list[tuple[str, np.ndarray, np.ndarray, np.ndarray]] = []
    rp = None

    if "roll_pitch" in angular:
        with _stage("roll_pitch"):
            ad, t = angular["roll_pitch"]
            rp = fit_roll_pitch(ad, geom, reciprocal=config.reciprocal)
            unit = "rads2" if config.reciprocal else "nm"
            diags[f"roll_fit_rmse_{unit}"] = rp.roll_rmse
            diags[f"pitch_fit_rmse_{unit}"] = rp.pitch_rmse
            partial["ixx_kg_m2"] = rp.ixx
            partial["iyy_kg_m2"] = rp.iyy
            torques = positional_torques(geom, ad.forces)
            angular_rows.append(("roll", t, ad.angular_accel[:, 0], torques[:, 0]))
            angular_rows.append(("pitch", t, ad.angular_accel[:, 1], torques[:, 1]))
    else:
        warnings.append("roll_pitch segment missing; ixx and iyy skipped")
        for key in ("ixx_kg_m2", "iyy_kg_m2"):
            skipped[f"inertia.{key}"] = "no roll_pitch segment"

    if "yaw" in angular:
        with _stage("yaw"):
            ad, t = angular["yaw"]
            ratio = fit_yaw_ratio(ad, geom)
            drive = yaw_drive(geom, ad.forces)
            diags["yaw_fit_rmse_n"] = float(np.sqrt(np.mean(
                (drive - ratio * ad.angular_accel[:, 2]) ** 2)))
            partial["yaw_ratio_kg_m"] = ratio
            angular_rows.append(("yaw", t, ad.angular_accel[:, 2], drive))
            if rp is not None:
                izz = predict_izz(rp.ixx, rp.iyy, config.c_xy_z)
                k_direct = fit_k_tau(ad, geom, izz)
                diags["k_tau_direct_nm_per_n"] = k_direct
                inertia_est = assemble_inertia_estimate(rp.ixx, rp.iyy, ratio,
                                                        c_xy_z=config.c_xy_z,
                                                        diagnostics=diags)
                if abs(k_direct - inertia_est.k_tau) > 0.1 * abs(inertia_est.k_tau):
                    warnings.append(
                        f"yaw torque coefficient fits disagree: ratio route "
                        f"{inertia_est.k_tau:.4g}, direct route {k_direct:.4g}")
            else:
                for key in ("izz_kg_m2", "k_tau_nm_per_n"):
                    skipped[f"inertia.{key}"] = "no roll_pitch segment"
    else:
        warnings.append("yaw segment missing; izz, k_tau and yaw ratio skipped")
        for key in ("izz_kg_m2", "k_tau_nm_per_n", "yaw_ratio_kg_m"):
            skipped[f"inertia.{key}"] = "no yaw segment"

    if angular_rows:
        plots["angular_fit"] = angular_rows

    hover: Optional[HoverStats] = None
    with _stage("hover"):
        try:
            hover = hover_analysis(linear, speeds_lin, motor_est.curve, geom,
                                   config.hover_percentile)
        except NoRealRoot as e:
            skipped["hover"] = str(e)
            warnings.append(f"hover analysis skipped: {e}")
        else:
            g = float(np.linalg.norm(geom.gravity))
            score = np.abs(np.linalg.norm(linear.accel, axis=1) - g)
            k = max(1, int(round(config.hover_percentile * linear.n_samples)))
            plots["hover_hist"] = speeds_lin[np.argsort(score, kind="stable")[:k]]

    validation: Optional[dict] = None
    if inertia_est is not None:
        with _stage("validate"):
            params = QuadrotorParams(
                geometry=geom,
                inertia=(inertia_est.ixx, inertia_est.iyy, inertia_est.izz),
                time_constant=t_hat, thrust_curve=motor_est.curve,
                k_tau=inertia_est.k_tau)
            per_segment = {}
            acc_sq = ang_sq = total = 0
            for label, sub in sorted(segs.items()):
                res = validate(sub, params)
                per_segment[label] = res
                n = sub.n_samples
                acc_sq += n * res["accel_rmse_ms2"] ** 2
                ang_sq += n * res["angular_accel_rmse_rads2"] ** 2
                total += n
            validation = {
                "accel_rmse_ms2": float(np.sqrt(acc_sq / total)),
                "angular_accel_rmse_rads2": float(np.sqrt(ang_sq / total)),
                "segments": per_segment,
            }
    else:
        skipped["validation"] = "inertia estimate incomplete"

    provenance = {
        "inputs": [{"name": name, "sha256": digest}
                   for (name, _), digest in zip(named, digests)],
        "config": config.to_dict(),
        "tool_version": __version__,
    }
    return IdentificationReport(
        report_id=compute_report_id(digests, config),
        created_utc=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        motor=motor_est, inertia=inertia_est, inertia_partial=partial,
        inertia_diagnostics=diags, hover=hover, validation=validation,
        provenance=provenance, warnings=warnings, skipped=skipped, plots=plots)


PLOT_KINDS = ("sweep", "thrust_fit", "angular_fit", "hover_hist")


def _fmt(v: float) -> str:
    return repr(float(v))


def export_plot_data(report: IdentificationReport, which: str) -> str:
    """Columnar CSV for one figure kind; SeriesUnavailable when the report
    has no such series (stage skipped or unknown kind)."""
    if which not in PLOT_KINDS:
        raise SeriesUnavailable(f"unknown plot kind {which!r}; have {PLOT_KINDS}")
    if which not in report.plots:
        raise SeriesUnavailable(f"report {report.report_id} has no {which!r} series")
    data = report.plots[which]
    lines: list[str] = []
    if which == "sweep":
        lines.append("t_m_s,rmse")
        for t_m, rmse in np.asarray(data):
            lines.append(f"{_fmt(t_m)},{_fmt(rmse)}")
    elif which == "thrust_fit":
        lines.append("t_s,meas_fx_n,meas_fy_n,meas_fz_n,pred_fx_n,pred_fy_n,pred_fz_n")
        t, meas, pred = data["t"], data["measured"], data["predicted"]
        for k in range(len(t)):
            row = [t[k], *meas[k], *pred[k]]
            lines.append(",".join(_fmt(v) for v in row))
    elif which == "angular_fit":
        lines.append("axis,t_s,ang_accel_rads2,torque_term")
        for axis, t, wd, torque in data:
            for k in range(len(t)):
                lines.append(f"{axis},{_fmt(t[k])},{_fmt(wd[k])},{_fmt(torque[k])}")
    else:
        lines.append("m0,m1,m2,m3")
        for row in np.asarray(data):
            lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"
