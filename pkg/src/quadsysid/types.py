"""Shared data carriers: raw logs, synchronized datasets, platform geometry."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np


class Channel(NamedTuple):
    """One logged time series: timestamps in seconds plus per-sample vectors."""

    timestamps: np.ndarray  # (n,) seconds, nondecreasing
    values: np.ndarray      # (n, arity)


@dataclass
class RawLog:
    """Parsed log prior to resampling. Channel arrays are read-only."""

    channels: dict[str, Channel]
    metadata: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_channels(cls, raw: dict[str, tuple[np.ndarray, np.ndarray]],
                      metadata: Optional[dict[str, str]] = None) -> "RawLog":
        """Build a log, dropping out-of-order samples (real logs contain a few).

        The number of dropped samples is recorded under the
        ``dropped_out_of_order`` metadata key.
        """
        channels: dict[str, Channel] = {}
        dropped_total = 0
        for name, (ts, vals) in raw.items():
            ts = np.asarray(ts, dtype=np.float64)
            vals = np.asarray(vals, dtype=np.float64)
            if vals.ndim == 1:
                vals = vals[:, None]
            if ts.size > 1:
                # a sample is kept iff its timestamp is the running maximum
                keep = ts == np.maximum.accumulate(ts)
                dropped = int(ts.size - np.count_nonzero(keep))
                if dropped:
                    dropped_total += dropped
                    ts = ts[keep]
                    vals = vals[keep]
            ts.flags.writeable = False
            vals.flags.writeable = False
            channels[name] = Channel(ts, vals)
        meta = dict(metadata or {})
        if dropped_total:
            meta["dropped_out_of_order"] = str(dropped_total)
        return cls(channels=channels, metadata=meta)

    def field_names(self, channel: str) -> Optional[list[str]]:
        names = self.metadata.get(f"fields.{channel}")
        return names.split(",") if names else None


@dataclass(frozen=True)
class ChannelSpec:
    """Selects a channel and the value-vector entries to keep, in order.

    ``fields`` entries are integer indices into the channel's value vectors;
    string entries are resolved against the recorded field names (CSV columns,
    ULog format fields).
    """

    name: str
    fields: tuple[Union[int, str], ...]


@dataclass(frozen=True)
class ChannelMapping:
    """Where to find accelerometer, gyro and motor setpoints in a log."""

    accel: ChannelSpec
    gyro: ChannelSpec
    setpoint: ChannelSpec
    setpoint_scale: tuple[float, float] = (0.0, 1.0)
    # seconds per raw timestamp unit for CSV logs; None = infer from the
    # timestamp column name ("timestamp" is ms on Crazyflie decks, else s)
    csv_time_scale: Optional[float] = None

    def __post_init__(self):
        lo, hi = self.setpoint_scale
        if not hi > lo:
            raise ValueError(f"setpoint_scale must satisfy raw_max > raw_min, got ({lo}, {hi})")


@dataclass
class SysIdDataset:
    """Uniformly sampled, synchronized proprioceptive series.

    accel is the body-frame specific force in m/s^2, gyro the body rates in
    rad/s, setpoints the normalized motor commands in [0, 1]. segments are
    (label, start, end) index ranges, end exclusive.
    """

    dt: float
    t0: float
    accel: np.ndarray          # (n, 3)
    gyro: np.ndarray           # (n, 3)
    setpoints: np.ndarray      # (n, 4)
    angular_accel: Optional[np.ndarray] = None  # (n, 3) rad/s^2 when logged
    segments: list[tuple[str, int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.accel = np.asarray(self.accel, dtype=np.float64)
        self.gyro = np.asarray(self.gyro, dtype=np.float64)
        self.setpoints = np.asarray(self.setpoints, dtype=np.float64)
        if self.angular_accel is not None:
            self.angular_accel = np.asarray(self.angular_accel, dtype=np.float64)
        n = len(self.accel)
        if n < 2:
            raise ValueError("dataset needs at least 2 samples")
        for name in ("gyro", "setpoints", "angular_accel"):
            arr = getattr(self, name)
            if arr is not None and len(arr) != n:
                raise ValueError(f"{name} length {len(arr)} != accel length {n}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.setpoints.min() < -1e-9 or self.setpoints.max() > 1 + 1e-9:
            raise ValueError("setpoints must lie in [0, 1]")
        for label, start, end in self.segments:
            if not (0 <= start < end <= n):
                raise ValueError(f"segment {label!r} range [{start}, {end}) out of bounds for {n} samples")

    @property
    def n_samples(self) -> int:
        return len(self.accel)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_samples) * self.dt

    def segment_labels(self) -> list[str]:
        return [label for label, _, _ in self.segments]


@dataclass(frozen=True)
class RigidBodyGeometry:
    """Known-a-priori platform constants.

    Rotor positions are in the body frame (meters); force axes are unit thrust
    directions; torque axes are unit vectors whose sign encodes spin direction
    (reaction torque acts along +torque_axis per unit K_tau * thrust).
    """

    mass: float
    rotor_positions: np.ndarray    # (4, 3)
    rotor_force_axes: np.ndarray   # (4, 3) unit
    rotor_torque_axes: np.ndarray  # (4, 3) unit
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.81]))

    def __post_init__(self):
        object.__setattr__(self, "rotor_positions", np.asarray(self.rotor_positions, dtype=np.float64))
        object.__setattr__(self, "rotor_force_axes", np.asarray(self.rotor_force_axes, dtype=np.float64))
        object.__setattr__(self, "rotor_torque_axes", np.asarray(self.rotor_torque_axes, dtype=np.float64))
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=np.float64))
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        for name in ("rotor_positions", "rotor_force_axes", "rotor_torque_axes"):
            if getattr(self, name).shape != (4, 3):
                raise ValueError(f"{name} must have shape (4, 3)")
        for name in ("rotor_force_axes", "rotor_torque_axes"):
            norms = np.linalg.norm(getattr(self, name), axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-9):
                raise ValueError(f"{name} rows must be unit vectors")
        if np.allclose(self.rotor_positions, self.rotor_positions[0]):
            raise ValueError("rotor positions must not all coincide")

    @property
    def torque_arms(self) -> np.ndarray:
        """Per-rotor moment arm r_p x r_f, shape (4, 3)."""
        return np.cross(self.rotor_positions, self.rotor_force_axes)


def crazyflie_geometry(mass: float = 0.027, arm: float = 0.0325) -> RigidBodyGeometry:
    """Symmetric X-configuration micro quad, z-up body frame.

    Motors 0/2 (front-left diagonal pair at (+d,+d) and (-d,-d)) spin CCW and
    exert a -z reaction torque on the body; motors 1/3 spin CW.
    """
    d = arm
    return RigidBodyGeometry(
        mass=mass,
        rotor_positions=np.array([
            [+d, +d, 0.0],
            [+d, -d, 0.0],
            [-d, -d, 0.0],
            [-d, +d, 0.0],
        ]),
        rotor_force_axes=np.array([[0.0, 0.0, 1.0]] * 4),
        rotor_torque_axes=np.array([
            [0.0, 0.0, -1.0],
            [0.0, 0.0, +1.0],
            [0.0, 0.0, -1.0],
            [0.0, 0.0, +1.0],
        ]),
    )


def default_channel_mapping() -> ChannelMapping:
    """Mapping matching the channel names the simulator writes."""
    return ChannelMapping(
        accel=ChannelSpec("sensor_accel", (0, 1, 2)),
        gyro=ChannelSpec("sensor_gyro", (0, 1, 2)),
        setpoint=ChannelSpec("actuator_motors", (0, 1, 2, 3)),
        setpoint_scale=(0.0, 1.0),
    )
