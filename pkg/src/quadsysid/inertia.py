"""Angular-dynamics identification: roll/pitch inertia, yaw ratio, Izz, K_tau.

With all rotors thrusting along body z the torque map loses rank: the yaw
equation only constrains the ratio Izz/K_tau. The ratio is decomposed using
the empirical constant C_xy->z = Izz / ((Ixx+Iyy)/2), whose value is stable
across published quadrotor platforms (mean 1.832 over the twelve vehicles
tabulated in inertia_reference_entries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import signal

from .errors import InsufficientExcitation, LengthMismatch, NonPositiveInput, TooShort
from .lsq import LinearSystem
from .types import RigidBodyGeometry

C_XY_Z_DEFAULT = 1.832

# a regression axis counts as unexcited below this regressor variance
EXCITATION_VARIANCE_FLOOR = 1e-12


@dataclass(frozen=True)
class AngularDataset:
    """Series feeding the angular-dynamics fits. forces come from a fitted
    thrust curve applied to reconstructed motor speeds."""

    gyro: np.ndarray           # (n, 3) rad/s
    angular_accel: np.ndarray  # (n, 3) rad/s^2
    forces: np.ndarray         # (n, 4) N

    def __post_init__(self):
        object.__setattr__(self, "gyro", np.asarray(self.gyro, dtype=np.float64))
        object.__setattr__(self, "angular_accel", np.asarray(self.angular_accel, dtype=np.float64))
        object.__setattr__(self, "forces", np.asarray(self.forces, dtype=np.float64))
        n = len(self.gyro)
        if len(self.angular_accel) != n or len(self.forces) != n:
            raise LengthMismatch(
                f"series lengths differ: gyro {n}, angular_accel {len(self.angular_accel)}, "
                f"forces {len(self.forces)}")

    @property
    def n_samples(self) -> int:
        return len(self.gyro)


@dataclass(frozen=True)
class InertiaEstimate:
    """Identified angular parameters.

    By construction izz = (ixx+iyy)/2 * c_xy_z exactly and
    k_tau = izz / yaw_ratio, so yaw_ratio * k_tau reproduces izz.
    diagnostics carries per-fit RMSE values and the independently fitted
    k_tau for cross-checking.
    """

    ixx: float
    iyy: float
    izz: float
    k_tau: float
    yaw_ratio: float    # Izz / K_tau, kg m^2
    c_xy_z: float
    diagnostics: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("ixx", "iyy", "izz"):
            if not getattr(self, name) > 0:
                raise NonPositiveInput(f"{name} must be positive, got {getattr(self, name)}")
        if abs(self.yaw_ratio * self.k_tau - self.izz) > 1e-9 * abs(self.izz):
            raise ValueError("yaw_ratio * k_tau must reproduce izz")


class RollPitchFit(NamedTuple):
    ixx: float
    iyy: float
    roll_rmse: float
    pitch_rmse: float


def angular_acceleration(gyro: np.ndarray, dt: float) -> np.ndarray:
    """Central differences interior, one-sided at the endpoints."""
    gyro = np.asarray(gyro, dtype=np.float64)
    if len(gyro) < 3:
        raise TooShort(f"need at least 3 samples to differentiate, got {len(gyro)}")
    if not dt > 0:
        raise NonPositiveInput(f"dt must be positive, got {dt}")
    return np.gradient(gyro, dt, axis=0, edge_order=1)


def smooth_series(x: np.ndarray, window: int) -> np.ndarray:
    """Zero-phase two-pass moving average along axis 0; window <= 1 is a no-op."""
    x = np.asarray(x, dtype=np.float64)
    window = int(window)
    if window <= 1:
        return x.copy()
    if len(x) <= 3 * window:
        raise TooShort(f"{len(x)} samples is too short for a window of {window}")
    kernel = np.ones(window) / window
    return signal.filtfilt(kernel, [1.0], x, axis=0)


def positional_torques(geom: RigidBodyGeometry, forces: np.ndarray) -> np.ndarray:
    """Torque from thrust-vector offsets: sum_i (r_pi x r_fi) f_i, shape (n, 3)."""
    return np.asarray(forces, dtype=np.float64) @ geom.torque_arms


def yaw_drive(geom: RigidBodyGeometry, forces: np.ndarray) -> np.ndarray:
    """z component of the reaction-torque direction weighted by thrust,
    sum_i r_tau_iz * f_i; this is what K_tau multiplies in the yaw equation."""
    return np.asarray(forces, dtype=np.float64) @ geom.rotor_torque_axes[:, 2]


def build_full_inertia_system(ad: AngularDataset, geom: RigidBodyGeometry) -> LinearSystem:
    """Full 7-unknown system per sample: 3 rows over [Ixx Iyy Izz Ktau1..4].

    The inertia block carries the precession products, the K_tau block the
    per-motor reaction torques; the target is the positional torque.
    Assumes the inertia tensor is diagonal in the body frame.
    """
    w = ad.gyro
    wd = ad.angular_accel
    n = ad.n_samples
    a_j = np.zeros((n, 3, 3))
    a_j[:, 0, 0] = wd[:, 0]
    a_j[:, 0, 1] = -w[:, 1] * w[:, 2]
    a_j[:, 0, 2] = w[:, 2] * w[:, 1]
    a_j[:, 1, 0] = w[:, 0] * w[:, 2]
    a_j[:, 1, 1] = wd[:, 1]
    a_j[:, 1, 2] = -w[:, 2] * w[:, 0]
    a_j[:, 2, 0] = -w[:, 0] * w[:, 1]
    a_j[:, 2, 1] = w[:, 1] * w[:, 0]
    a_j[:, 2, 2] = wd[:, 2]
    # column i: -r_tau_i * f_i
    a_kt = -geom.rotor_torque_axes.T[None, :, :] * ad.forces[:, None, :]
    a = np.concatenate([a_j, a_kt], axis=2).reshape(3 * n, 7)
    b = positional_torques(geom, ad.forces).reshape(3 * n)
    return LinearSystem(a=a, b=b, row_blocks=n)


def _scalar_fit(regressor: np.ndarray, target: np.ndarray, what: str) -> tuple[float, float]:
    """One-unknown least squares target ~= coef * regressor -> (coef, rmse)."""
    if float(np.var(regressor)) < EXCITATION_VARIANCE_FLOOR:
        raise InsufficientExcitation(f"no signal in {what} (regressor variance below floor)")
    denom = float(regressor @ regressor)
    coef = float(regressor @ target) / denom
    rmse = float(np.sqrt(np.mean((target - coef * regressor) ** 2)))
    return coef, rmse


def fit_roll_pitch(ad: AngularDataset, geom: RigidBodyGeometry,
                   reciprocal: bool = False) -> RollPitchFit:
    """Decoupled scalar regressions wd_x * Ixx = torque_x and likewise for y.

    Valid in the small-angular-velocity regime where the precession terms
    vanish. With reciprocal=True the inverse inertia is the unknown instead
    (torque as regressor), which weights noise differently; the returned RMSE
    is that of the regression actually performed (rad/s^2 in that mode).
    """
    torques = positional_torques(geom, ad.forces)
    out = []
    for axis, name in ((0, "roll"), (1, "pitch")):
        wd = ad.angular_accel[:, axis]
        tau = torques[:, axis]
        if reciprocal:
            inv, rmse = _scalar_fit(tau, wd, f"{name} torque")
            if abs(inv) < 1e-300:
                raise InsufficientExcitation(f"{name} reciprocal fit returned zero")
            out.append((1.0 / inv, rmse))
        else:
            coef, rmse = _scalar_fit(wd, tau, f"{name} angular acceleration")
            out.append((coef, rmse))
    return RollPitchFit(ixx=out[0][0], iyy=out[1][0], roll_rmse=out[0][1], pitch_rmse=out[1][1])


def fit_yaw_ratio(ad: AngularDataset, geom: RigidBodyGeometry) -> float:
    """Regress the yaw torque drive on the yaw acceleration: the slope is
    Izz/K_tau. Only the ratio is identifiable from vertically-actuated data."""
    ratio, _ = _scalar_fit(ad.angular_accel[:, 2], yaw_drive(geom, ad.forces),
                           "yaw angular acceleration")
    return ratio


def predict_izz(ixx: float, iyy: float, c: float = C_XY_Z_DEFAULT) -> float:
    """Izz from the roll/pitch estimates via the cross-platform ratio."""
    if not (ixx > 0 and iyy > 0):
        raise NonPositiveInput(f"inertias must be positive, got ixx={ixx}, iyy={iyy}")
    if not c > 0:
        raise NonPositiveInput(f"c must be positive, got {c}")
    return 0.5 * (ixx + iyy) * c


def fit_k_tau(ad: AngularDataset, geom: RigidBodyGeometry, izz: float) -> float:
    """Scalar regression izz * wd_z ~= K_tau * drive with the drive as the
    regressor. Numerically close to izz / fit_yaw_ratio, but weighted by the
    drive rather than the acceleration, so the two disagree slightly under
    noise."""
    if not izz > 0:
        raise NonPositiveInput(f"izz must be positive, got {izz}")
    drive = yaw_drive(geom, ad.forces)
    k_tau, _ = _scalar_fit(drive, izz * ad.angular_accel[:, 2], "yaw torque drive")
    return k_tau


def inertia_scaling_table(entries: Sequence[tuple[float, float, float]]) -> tuple[float, list[float]]:
    """Per-entry ratio izz / ((ixx+iyy)/2) and the mean over entries."""
    ratios = []
    for ixx, iyy, izz in entries:
        if not (ixx > 0 and iyy > 0 and izz > 0):
            raise NonPositiveInput(f"inertia entries must be positive, got {(ixx, iyy, izz)}")
        ratios.append(izz / (0.5 * (ixx + iyy)))
    if not ratios:
        raise ValueError("no entries")
    return float(np.mean(ratios)), ratios


def inertia_reference_entries() -> list[tuple[str, float, float, float]]:
    """Published (Ixx, Iyy, Izz) values for twelve quadrotor platforms; the
    source of the default C_xy->z."""
    return [
        ("x500 (PX4 Gazebo)", 2.200e-02, 2.200e-02, 4.000e-02),
        ("Leshikar et al., 2021", 5.470e+01, 1.560e+01, 5.720e+01),
        ("Kaputa et al., 2020", 4.270e-04, 6.090e-04, 1.500e-03),
        ("Flightmare", 7.911e-03, 7.911e-03, 1.231e-02),
        ("Iris (PX4 Gazebo)", 2.913e-02, 2.913e-02, 5.523e-02),
        ("px4vision (PX4 Gazebo)", 2.913e-02, 2.913e-02, 5.523e-02),
        ("X-wing", 1.840e-01, 1.910e-01, 3.360e-01),
        ("Crazyflie 2.0 (Foerster)", 1.660e-05, 1.670e-05, 2.930e-05),
        ("Crazyflie 2.0 (Landry)", 2.400e-05, 2.400e-05, 3.230e-05),
        ("Crazyflie (disk model)", 1.389e-05, 1.389e-05, 2.734e-05),
        ("Crazyflie (Sanca)", 1.248e-05, 1.248e-05, 2.342e-05),
        ("Crazyflie (Luis)", 1.400e-05, 1.400e-05, 2.170e-05),
    ]


def assemble_inertia_estimate(ixx: float, iyy: float, yaw_ratio: float,
                              c_xy_z: float = C_XY_Z_DEFAULT,
                              diagnostics: Optional[dict[str, float]] = None) -> InertiaEstimate:
    """Combine the decoupled fits into a full estimate: izz from the ratio
    constant, k_tau from decomposing the identified yaw ratio."""
    izz = predict_izz(ixx, iyy, c_xy_z)
    if not yaw_ratio > 0:
        raise NonPositiveInput(f"yaw ratio must be positive, got {yaw_ratio}")
    return InertiaEstimate(ixx=ixx, iyy=iyy, izz=izz, k_tau=izz / yaw_ratio,
                           yaw_ratio=yaw_ratio, c_xy_z=c_xy_z,
                           diagnostics=dict(diagnostics or {}))
