"""Alignment of raw log channels onto a shared uniform grid."""

from __future__ import annotations

from typing import Union

import numpy as np

from .errors import DegenerateChannel, EmptyOverlap, MissingColumn, UnknownLabel
from .types import ChannelMapping, ChannelSpec, RawLog, SysIdDataset


def _resolve_fields(log: RawLog, spec: ChannelSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.name not in log.channels:
        raise MissingColumn(f"log has no channel {spec.name!r} "
                            f"(available: {sorted(log.channels)})")
    ts, values = log.channels[spec.name]
    if len(ts) < 2:
        raise DegenerateChannel(f"channel {spec.name!r} has {len(ts)} samples, need at least 2")
    names = log.field_names(spec.name)
    idxs = []
    for f in spec.fields:
        if isinstance(f, int):
            if not 0 <= f < values.shape[1]:
                raise MissingColumn(f"channel {spec.name!r}: field index {f} out of range "
                                    f"for arity {values.shape[1]}")
            idxs.append(f)
        else:
            if names is None or f not in names:
                raise MissingColumn(f"channel {spec.name!r}: no field named {f!r}")
            idxs.append(names.index(f))
    return ts, values[:, idxs]


def resample_sync(log: RawLog, mapping: ChannelMapping, dt: float) -> SysIdDataset:
    """Interpolate sensors and zero-order-hold setpoints onto one grid.

    The grid starts at the latest channel start and steps by dt up to the
    earliest channel end. Setpoints are normalized by mapping.setpoint_scale
    and clipped to [0, 1].
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    accel_ts, accel = _resolve_fields(log, mapping.accel)
    gyro_ts, gyro = _resolve_fields(log, mapping.gyro)
    sp_ts, sp = _resolve_fields(log, mapping.setpoint)

    t_start = max(accel_ts[0], gyro_ts[0], sp_ts[0])
    t_end = min(accel_ts[-1], gyro_ts[-1], sp_ts[-1])
    # tolerance absorbs float noise in timestamps near the grid boundary
    eps = max(dt * 1e-9, 8e-16 * max(abs(t_start), abs(t_end)))
    if t_end - t_start < dt - eps:
        raise EmptyOverlap(f"channels overlap for {max(t_end - t_start, 0.0):.6g} s, "
                           f"shorter than one grid step {dt:.6g} s")
    n = int(np.floor((t_end - t_start + eps) / dt)) + 1
    grid = t_start + dt * np.arange(n)

    def interp_block(ts: np.ndarray, vals: np.ndarray) -> np.ndarray:
        return np.column_stack([np.interp(grid, ts, vals[:, j])
                                for j in range(vals.shape[1])])

    accel_g = interp_block(accel_ts, accel)
    gyro_g = interp_block(gyro_ts, gyro)

    # hold the most recent setpoint: eps keeps grid points that land a
    # rounding error before a source timestamp from reading the stale value
    hold = np.searchsorted(sp_ts, grid + eps, side="right") - 1
    hold = np.clip(hold, 0, len(sp_ts) - 1)
    raw = sp[hold]

    lo, hi = mapping.setpoint_scale
    setpoints = np.clip((raw - lo) / (hi - lo), 0.0, 1.0)

    return SysIdDataset(dt=dt, t0=float(t_start), accel=accel_g, gyro=gyro_g,
                        setpoints=setpoints)


def select_segment(ds: SysIdDataset, label: str) -> SysIdDataset:
    """Extract the first segment with the given label as its own dataset."""
    for seg_label, start, stop in ds.segments:
        if seg_label == label:
            return slice_dataset(ds, start, stop, label)
    raise UnknownLabel(f"no segment labelled {label!r} "
                       f"(have: {[s for s, _, _ in ds.segments]})")


def slice_dataset(ds: SysIdDataset, start: int, stop: int,
                  label: Union[str, None] = None) -> SysIdDataset:
    """Sample-range view [start, stop) as a standalone dataset."""
    if not 0 <= start < stop <= ds.n_samples:
        raise ValueError(f"slice [{start}, {stop}) out of range for {ds.n_samples} samples")
    segments = [(label, 0, stop - start)] if label is not None else []
    angular = ds.angular_accel[start:stop] if ds.angular_accel is not None else None
    return SysIdDataset(dt=ds.dt, t0=ds.t0 + start * ds.dt,
                        accel=ds.accel[start:stop], gyro=ds.gyro[start:stop],
                        setpoints=ds.setpoints[start:stop],
                        angular_accel=angular, segments=segments)
