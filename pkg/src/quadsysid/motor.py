"""First-order motor model, thrust-curve regression, time-constant sweep.

The motor speed follows the setpoint with a first-order lag of time constant
T_m. Under piecewise-constant commands the exact discrete update is the
exponential moving average w[k+1] = alpha*w[k] + (1-alpha)*u[k] with
alpha = exp(-dt/T_m). Per-motor thrust is quadratic in the (normalized)
speed, which makes the thrust fit linear in the curve coefficients; T_m is
found by sweeping candidates and keeping the one with the smallest stacked
least-squares residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import signal

from .errors import LengthMismatch, NonPositiveInput, NoRealRoot, TooShort
from .lsq import LinearSystem, LsqSolution, grid_minimize, solve_ols
from .types import RigidBodyGeometry, SysIdDataset

# regression needs this many samples per unknown before a sweep is attempted
MIN_SAMPLES_PER_UNKNOWN = 10

# command transient excluded from regressions at a segment start, in units of T_m
TRANSIENT_SKIP_FACTOR = 5.0


@dataclass(frozen=True)
class ThrustCurve:
    """Per-motor quadratic thrust polynomials f_i = sum_j coeffs[i, j] w^j.

    coeffs has shape (4, 3), or (1, 3) when a single lumped polynomial is
    shared by all motors. Units: Newtons per (normalized command)^j.
    """

    coeffs: np.ndarray
    lumped: bool

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.float64))
        expected = (1, 3) if self.lumped else (4, 3)
        if self.coeffs.shape != expected:
            raise ValueError(f"coeffs shape {self.coeffs.shape}, expected {expected}")

    def per_motor(self) -> np.ndarray:
        """Coefficients expanded to one row per motor, shape (4, 3)."""
        if self.lumped:
            return np.repeat(self.coeffs, 4, axis=0)
        return self.coeffs

    def mean_coeffs(self) -> np.ndarray:
        return self.coeffs.mean(axis=0)


@dataclass
class MotorModelEstimate:
    time_constant: float                 # seconds
    curve: ThrustCurve
    sweep_curve: np.ndarray              # (points, 2): candidate T_m, fit RMSE in m/s^2
    fit_rmse: float                      # m/s^2, equals the sweep curve at time_constant
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class HoverStats:
    percentile: float
    mean_command: np.ndarray             # (4,) mean normalized command near hover
    predicted_hover_command: float       # root of the thrust curve at m*g/4


def ema_alpha(t_m: float, dt: float) -> float:
    """Discrete decay factor exp(-dt/t_m), strictly inside (0, 1)."""
    if not t_m > 0:
        raise NonPositiveInput(f"time constant must be positive, got {t_m}")
    if not dt > 0:
        raise NonPositiveInput(f"dt must be positive, got {dt}")
    return math.exp(-dt / t_m)


def simulate_motor_speeds(setpoints: np.ndarray, t_m: float, dt: float,
                          initial: Union[float, np.ndarray]) -> np.ndarray:
    """Run the EMA recursion independently per motor.

    Output sample 0 equals `initial`; sample k responds to setpoints[:k].
    Matches the simulator's motor update bit for bit (same alpha, same
    update arithmetic via the filter recursion).
    """
    alpha = ema_alpha(t_m, dt)
    u = np.asarray(setpoints, dtype=np.float64)
    squeeze = u.ndim == 1
    if squeeze:
        u = u[:, None]
    init = np.broadcast_to(np.asarray(initial, dtype=np.float64), (u.shape[1],))
    if u.shape[0] == 0:
        return np.zeros_like(u[:, 0] if squeeze else u)
    out = np.empty_like(u)
    b = [0.0, 1.0 - alpha]
    a = [1.0, -alpha]
    for i in range(u.shape[1]):
        out[:, i], _ = signal.lfilter(b, a, u[:, i], zi=[init[i]])
    return out[:, 0] if squeeze else out


def build_thrust_system(ds: SysIdDataset, speeds: np.ndarray,
                        geom: RigidBodyGeometry, lumped: bool) -> LinearSystem:
    """Per sample k: 3 equations m*o_acc(k) = sum_i r_fi * f_i(w_i(k)).

    Unknowns are the curve coefficients: 12 columns ordered motor-major
    (K_10, K_11, K_12, K_20, ...), or 3 columns with the per-motor basis
    summed when lumped.
    """
    speeds = np.asarray(speeds, dtype=np.float64)
    n = ds.n_samples
    if speeds.shape != (n, 4):
        raise LengthMismatch(f"speeds shape {speeds.shape}, expected ({n}, 4)")
    powers = np.stack([np.ones_like(speeds), speeds, speeds * speeds], axis=2)  # (n, 4, 3)
    r_f = geom.rotor_force_axes
    if lumped:
        a = np.einsum("nij,ix->nxj", powers, r_f).reshape(3 * n, 3)
    else:
        a = np.einsum("nij,ix->nxij", powers, r_f).reshape(3 * n, 12)
    b = (geom.mass * ds.accel).reshape(3 * n)
    return LinearSystem(a=a, b=b, row_blocks=n)


def fit_thrust_curve(ds: SysIdDataset, speeds: np.ndarray, geom: RigidBodyGeometry,
                     lumped: bool, skip: int = 0) -> tuple[ThrustCurve, LsqSolution]:
    """Solve the thrust system, optionally dropping the first `skip` samples."""
    system = build_thrust_system(ds, speeds, geom, lumped)
    if skip > 0:
        system = LinearSystem(a=system.a[3 * skip:], b=system.b[3 * skip:],
                              row_blocks=system.row_blocks - skip)
    sol = solve_ols(system)
    coeffs = sol.x.reshape(1, 3) if lumped else sol.x.reshape(4, 3)
    return ThrustCurve(coeffs=coeffs, lumped=lumped), sol


def transient_skip(t_m: float, dt: float, n: int) -> int:
    """Samples to drop at a segment start so the assumed initial motor speed
    (first setpoint) cannot bias the fit; capped at half the data."""
    return min(int(math.ceil(TRANSIENT_SKIP_FACTOR * t_m / dt)), n // 2)


def sweep_time_constant(ds: SysIdDataset, geom: RigidBodyGeometry,
                        grid: Sequence[float], lumped: bool = True) -> MotorModelEstimate:
    """MAP sweep: for each candidate T_m reconstruct speeds, fit the thrust
    curve, record the residual RMSE; keep the candidate with the smallest."""
    n = ds.n_samples
    unknowns = 3 if lumped else 12
    if n < MIN_SAMPLES_PER_UNKNOWN * unknowns:
        raise TooShort(f"{n} samples < {MIN_SAMPLES_PER_UNKNOWN} per unknown ({unknowns} unknowns)")
    setpoints = ds.setpoints
    initial = setpoints[0]

    def objective(t_m: float) -> float:
        speeds = simulate_motor_speeds(setpoints, t_m, ds.dt, initial)
        _, sol = fit_thrust_curve(ds, speeds, geom, lumped, skip=transient_skip(t_m, ds.dt, n))
        # the regression residual is in Newtons; report it as an acceleration
        return sol.rmse / geom.mass

    best, curve = grid_minimize(objective, grid)
    speeds = simulate_motor_speeds(setpoints, best, ds.dt, initial)
    thrust_curve, _ = fit_thrust_curve(ds, speeds, geom, lumped,
                                       skip=transient_skip(best, ds.dt, n))
    sweep_curve = np.asarray(curve, dtype=np.float64)
    best_idx = int(np.nonzero(sweep_curve[:, 0] == best)[0][0])
    warnings = []
    if len(curve) > 1 and best_idx in (0, len(curve) - 1):
        warnings.append(
            f"time-constant sweep hit the grid boundary at {best:.6g} s; widen the sweep range")
    return MotorModelEstimate(time_constant=best, curve=thrust_curve,
                              sweep_curve=sweep_curve,
                              fit_rmse=float(sweep_curve[best_idx, 1]),
                              warnings=warnings)


def predict_thrust(curve: ThrustCurve, speeds: np.ndarray) -> np.ndarray:
    """Evaluate the per-motor polynomials; broadcasts over leading axes of
    a (..., 4) speeds array."""
    w = np.asarray(speeds, dtype=np.float64)
    c = curve.per_motor()
    return c[:, 0] + c[:, 1] * w + c[:, 2] * w * w


def hover_command(curve: ThrustCurve, mass: float, gravity_mag: float = 9.81) -> float:
    """Solve sum_j K_j w^j = m*g/4 for w on [0, 1] using the motor-mean curve."""
    c0, c1, c2 = curve.mean_coeffs()
    target = mass * gravity_mag / 4.0
    # roots of c2 w^2 + c1 w + (c0 - target)
    if abs(c2) < 1e-15:
        if abs(c1) < 1e-15:
            raise NoRealRoot("constant thrust curve never crosses the hover thrust")
        roots = [(target - c0) / c1]
    else:
        disc = c1 * c1 - 4.0 * c2 * (c0 - target)
        if disc < 0:
            raise NoRealRoot(f"thrust curve never reaches {target:.4g} N on [0, 1]")
        sq = math.sqrt(disc)
        roots = [(-c1 - sq) / (2.0 * c2), (-c1 + sq) / (2.0 * c2)]
    valid = [r for r in roots if -1e-9 <= r <= 1.0 + 1e-9]
    if not valid:
        raise NoRealRoot(f"no hover command in [0, 1] for thrust {target:.4g} N")
    # prefer the root on the rising branch of the curve
    rising = [r for r in valid if c1 + 2.0 * c2 * r > 0]
    root = max(rising) if rising else max(valid)
    return min(max(root, 0.0), 1.0)


def hover_analysis(ds: SysIdDataset, speeds: np.ndarray, curve: ThrustCurve,
                   geom: RigidBodyGeometry, percentile: float = 0.05) -> HoverStats:
    """Mean command over the samples nearest force balance.

    Attitude is not available, so |o_acc| close to |g| serves as the hover
    proxy; near hover it coincides with the force-balance condition.
    """
    if not 0.0 < percentile <= 1.0:
        raise ValueError(f"percentile must be in (0, 1], got {percentile}")
    speeds = np.asarray(speeds, dtype=np.float64)
    if speeds.shape != (ds.n_samples, 4):
        raise LengthMismatch(f"speeds shape {speeds.shape}, expected ({ds.n_samples}, 4)")
    g = float(np.linalg.norm(geom.gravity))
    score = np.abs(np.linalg.norm(ds.accel, axis=1) - g)
    k = max(1, int(round(percentile * ds.n_samples)))
    subset = np.argsort(score, kind="stable")[:k]
    return HoverStats(percentile=percentile,
                      mean_command=speeds[subset].mean(axis=0),
                      predicted_hover_command=hover_command(curve, geom.mass, g))
