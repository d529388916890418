"""Forward simulator: rigid body with motor lag, used as the round-trip oracle.

Motor speeds advance by the exact first-order discrete update (the same
recursion the identification assumes), the rigid body by one RK4 step per
sample interval with motor speeds held constant over the step. Hamilton
scalar-first quaternions, body-to-world rotation, world frame z-up with
gravity (0, 0, -9.81).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import TooShort, UnstableStep
from .motor import ThrustCurve, ema_alpha, predict_thrust, simulate_motor_speeds
from .types import RigidBodyGeometry, SysIdDataset, crazyflie_geometry

Vec3 = tuple[float, float, float]
Vec4 = tuple[float, float, float, float]


@dataclass(frozen=True)
class QuadrotorParams:
    """Everything the identification recovers, in one bundle."""

    geometry: RigidBodyGeometry
    inertia: Vec3              # diagonal (Jx, Jy, Jz), kg m^2
    time_constant: float       # seconds
    thrust_curve: ThrustCurve
    k_tau: float

    def __post_init__(self):
        object.__setattr__(self, "inertia", tuple(float(j) for j in self.inertia))
        if any(j <= 0 for j in self.inertia):
            raise ValueError(f"inertia entries must be positive, got {self.inertia}")
        if not self.time_constant > 0:
            raise ValueError(f"time constant must be positive, got {self.time_constant}")


@dataclass(frozen=True)
class SimState:
    position: Vec3
    velocity: Vec3
    orientation: Vec4          # unit quaternion, scalar first
    body_rates: Vec3           # rad/s
    motor_speeds: Vec4         # normalized

    @classmethod
    def at_rest(cls, motor_speeds: Sequence[float] = (0.0, 0.0, 0.0, 0.0)) -> "SimState":
        return cls(position=(0.0, 0.0, 0.0), velocity=(0.0, 0.0, 0.0),
                   orientation=(1.0, 0.0, 0.0, 0.0), body_rates=(0.0, 0.0, 0.0),
                   motor_speeds=tuple(float(m) for m in motor_speeds))


@dataclass(frozen=True)
class ExcitationScript:
    """A maneuver: setpoint(t) -> 4 commands in [0, 1] over [0, duration)."""

    name: str
    duration: float
    setpoint: Callable[[float], Sequence[float]]
    accel_sigma: float = 0.0   # m/s^2
    gyro_sigma: float = 0.0    # rad/s
    seed: int = 0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if self.accel_sigma < 0 or self.gyro_sigma < 0:
            raise ValueError("noise sigmas must be nonnegative")


class _Ctx:
    """Plain-float unpack of the parameters; keeps the step loop allocation-light."""

    __slots__ = ("mass", "gx", "gy", "gz", "jx", "jy", "jz", "coeffs",
                 "fax", "arms", "rtx", "k_tau", "t_m")

    def __init__(self, params: QuadrotorParams):
        geom = params.geometry
        self.mass = float(geom.mass)
        self.gx, self.gy, self.gz = (float(v) for v in geom.gravity)
        self.jx, self.jy, self.jz = params.inertia
        self.coeffs = tuple(tuple(float(c) for c in row) for row in params.thrust_curve.per_motor())
        self.fax = tuple(tuple(float(c) for c in row) for row in geom.rotor_force_axes)
        self.arms = tuple(tuple(float(c) for c in row) for row in geom.torque_arms)
        self.rtx = tuple(tuple(float(c) for c in row) for row in geom.rotor_torque_axes)
        self.k_tau = float(params.k_tau)
        self.t_m = float(params.time_constant)


def _force_torque(ctx: _Ctx, speeds: Vec4) -> tuple[Vec3, Vec3]:
    fx = fy = fz = 0.0
    tx = ty = tz = 0.0
    for i in range(4):
        w = speeds[i]
        c0, c1, c2 = ctx.coeffs[i]
        f = c0 + w * (c1 + w * c2)
        ax, ay, az = ctx.fax[i]
        fx += f * ax
        fy += f * ay
        fz += f * az
        mx, my, mz = ctx.arms[i]
        rx, ry, rz = ctx.rtx[i]
        kf = ctx.k_tau * f
        tx += f * mx + kf * rx
        ty += f * my + kf * ry
        tz += f * mz + kf * rz
    return (fx, fy, fz), (tx, ty, tz)


def _rhs(y: tuple, fb: Vec3, tau: Vec3, ctx: _Ctx) -> tuple:
    (_, _, _, vx, vy, vz, qw, qx, qy, qz, wx, wy, wz) = y
    # rotate the body thrust into the world frame: v' = v + 2w(uxv) + 2ux(uxv)
    bx, by, bz = fb[0] / ctx.mass, fb[1] / ctx.mass, fb[2] / ctx.mass
    cx = 2.0 * (qy * bz - qz * by)
    cy = 2.0 * (qz * bx - qx * bz)
    cz = 2.0 * (qx * by - qy * bx)
    ax = bx + qw * cx + (qy * cz - qz * cy) + ctx.gx
    ay = by + qw * cy + (qz * cx - qx * cz) + ctx.gy
    az = bz + qw * cz + (qx * cy - qy * cx) + ctx.gz
    # quaternion kinematics: qdot = q (0, omega) / 2
    qdw = -0.5 * (qx * wx + qy * wy + qz * wz)
    qdx = 0.5 * (qw * wx + qy * wz - qz * wy)
    qdy = 0.5 * (qw * wy - qx * wz + qz * wx)
    qdz = 0.5 * (qw * wz + qx * wy - qy * wx)
    # Euler equations for a diagonal inertia tensor
    wdx = (tau[0] + (ctx.jy - ctx.jz) * wy * wz) / ctx.jx
    wdy = (tau[1] + (ctx.jz - ctx.jx) * wz * wx) / ctx.jy
    wdz = (tau[2] + (ctx.jx - ctx.jy) * wx * wy) / ctx.jz
    return (vx, vy, vz, ax, ay, az, qdw, qdx, qdy, qdz, wdx, wdy, wdz)


def _angular_accel(ctx: _Ctx, speeds: Vec4, rates: Vec3) -> Vec3:
    _, tau = _force_torque(ctx, speeds)
    wx, wy, wz = rates
    return ((tau[0] + (ctx.jy - ctx.jz) * wy * wz) / ctx.jx,
            (tau[1] + (ctx.jz - ctx.jx) * wz * wx) / ctx.jy,
            (tau[2] + (ctx.jx - ctx.jy) * wx * wy) / ctx.jz)


def _step_core(state: SimState, setpoint: Sequence[float], ctx: _Ctx, dt: float) -> SimState:
    fb, tau = _force_torque(ctx, state.motor_speeds)
    y0 = state.position + state.velocity + state.orientation + state.body_rates
    k1 = _rhs(y0, fb, tau, ctx)
    half = 0.5 * dt
    y1 = tuple(a + half * b for a, b in zip(y0, k1))
    k2 = _rhs(y1, fb, tau, ctx)
    y2 = tuple(a + half * b for a, b in zip(y0, k2))
    k3 = _rhs(y2, fb, tau, ctx)
    y3 = tuple(a + dt * b for a, b in zip(y0, k3))
    k4 = _rhs(y3, fb, tau, ctx)
    sixth = dt / 6.0
    y = tuple(a + sixth * (b + 2.0 * (c + d) + e)
              for a, b, c, d, e in zip(y0, k1, k2, k3, k4))
    qn = math.sqrt(y[6] * y[6] + y[7] * y[7] + y[8] * y[8] + y[9] * y[9])
    alpha = ema_alpha(ctx.t_m, dt)
    one_minus = 1.0 - alpha
    speeds = tuple(one_minus * min(max(float(u), 0.0), 1.0) + alpha * m
                   for u, m in zip(setpoint, state.motor_speeds))
    new = SimState(position=y[0:3], velocity=y[3:6],
                   orientation=(y[6] / qn, y[7] / qn, y[8] / qn, y[9] / qn),
                   body_rates=y[10:13], motor_speeds=speeds)
    if not all(map(math.isfinite, new.position + new.velocity + new.orientation
                   + new.body_rates + new.motor_speeds)):
        raise UnstableStep("non-finite state after integration step")
    return new


def step(state: SimState, setpoint: Sequence[float], params: QuadrotorParams,
         dt: float) -> SimState:
    """Advance one sample interval. Motor speeds are held over the rigid-body
    integration and then advanced by the exact discrete motor update."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > params.time_constant / 2.0:
        raise UnstableStep(
            f"dt={dt} exceeds half the motor time constant {params.time_constant}")
    return _step_core(state, setpoint, _Ctx(params), dt)


def measure(state: SimState, prev_state: Optional[SimState], params: QuadrotorParams,
            dt: float, noise: tuple[float, float] = (0.0, 0.0),
            rng: Optional[np.random.Generator] = None) -> tuple[np.ndarray, np.ndarray]:
    """Accelerometer (specific force, body frame) and gyro with optional noise.

    The accelerometer reads the mass-normalized rotor thrust exactly: the only
    non-gravitational force in this model. prev_state and dt are accepted for
    callers that model a differencing sensor, but are not needed here.
    """
    ctx = _Ctx(params)
    fb, _ = _force_torque(ctx, state.motor_speeds)
    accel = np.array(fb) / ctx.mass
    gyro = np.array(state.body_rates, dtype=np.float64)
    sigma_a, sigma_g = noise
    if rng is not None:
        if sigma_a > 0:
            accel = accel + rng.normal(0.0, sigma_a, 3)
        if sigma_g > 0:
            gyro = gyro + rng.normal(0.0, sigma_g, 3)
    return accel, gyro


def run_script(script: Union[ExcitationScript, Sequence[ExcitationScript]],
               params: QuadrotorParams, dt: float) -> SysIdDataset:
    """Simulate one script, or several back to back sharing state; each script
    contributes one labeled segment. Deterministic given the script seeds."""
    scripts = [script] if isinstance(script, ExcitationScript) else list(script)
    if not scripts:
        raise ValueError("no scripts given")
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > min(s.duration for s in scripts):
        raise TooShort("script duration is shorter than one sample interval")
    if dt > params.time_constant / 2.0:
        raise UnstableStep(
            f"dt={dt} exceeds half the motor time constant {params.time_constant}")
    ctx = _Ctx(params)

    counts = [int(round(s.duration / dt)) for s in scripts]
    if any(c < 1 for c in counts):
        raise TooShort("script duration is shorter than one sample interval")
    total = sum(counts)
    if total < 2:
        raise TooShort("scripts must produce at least two samples")
    accel = np.empty((total, 3))
    gyro = np.empty((total, 3))
    setpoints = np.empty((total, 4))
    ang = np.empty((total, 3))

    first = scripts[0].setpoint(0.0)
    state = SimState.at_rest(motor_speeds=[min(max(float(u), 0.0), 1.0) for u in first])
    segments: list[tuple[str, int, int]] = []
    offset = 0
    for s, count in zip(scripts, counts):
        for k in range(count):
            t = k * dt
            u = tuple(min(max(float(v), 0.0), 1.0) for v in s.setpoint(t))
            row = offset + k
            fb, _ = _force_torque(ctx, state.motor_speeds)
            accel[row, 0] = fb[0] / ctx.mass
            accel[row, 1] = fb[1] / ctx.mass
            accel[row, 2] = fb[2] / ctx.mass
            gyro[row] = state.body_rates
            ang[row] = _angular_accel(ctx, state.motor_speeds, state.body_rates)
            setpoints[row] = u
            try:
                state = _step_core(state, u, ctx, dt)
            except UnstableStep as e:
                raise UnstableStep(f"{e} (script {s.name!r}, t={offset * dt + t:.4f} s)") from e
        rng = np.random.default_rng(s.seed)
        sl = slice(offset, offset + count)
        if s.accel_sigma > 0:
            accel[sl] += rng.normal(0.0, s.accel_sigma, (count, 3))
        if s.gyro_sigma > 0:
            gyro[sl] += rng.normal(0.0, s.gyro_sigma, (count, 3))
        segments.append((s.name, offset, offset + count))
        offset += count

    return SysIdDataset(dt=dt, t0=0.0, accel=accel, gyro=gyro, setpoints=setpoints,
                        angular_accel=ang, segments=segments)


def validate(ds: SysIdDataset, params: QuadrotorParams) -> dict[str, float]:
    """Predict the observations from the parameters alone and report RMSEs.

    Motor speeds are reconstructed from the logged setpoints, thrust and
    torque follow from the curve, and the angular acceleration prediction
    uses the observed rates for the precession terms. The angular residual is
    measured against the logged angular acceleration when present, else
    against differentiated gyro data.
    """
    from .inertia import angular_acceleration  # local import to avoid a cycle

    geom = params.geometry
    speeds = simulate_motor_speeds(ds.setpoints, params.time_constant, ds.dt, ds.setpoints[0])
    forces = predict_thrust(params.thrust_curve, speeds)
    pred_accel = (forces @ geom.rotor_force_axes) / geom.mass
    torques = forces @ geom.torque_arms + params.k_tau * (forces @ geom.rotor_torque_axes)
    jx, jy, jz = params.inertia
    w = ds.gyro
    pred_ang = np.empty_like(w)
    pred_ang[:, 0] = (torques[:, 0] + (jy - jz) * w[:, 1] * w[:, 2]) / jx
    pred_ang[:, 1] = (torques[:, 1] + (jz - jx) * w[:, 2] * w[:, 0]) / jy
    pred_ang[:, 2] = (torques[:, 2] + (jx - jy) * w[:, 0] * w[:, 1]) / jz
    obs_ang = ds.angular_accel if ds.angular_accel is not None else angular_acceleration(ds.gyro, ds.dt)
    return {
        "accel_rmse_ms2": float(np.sqrt(np.mean((pred_accel - ds.accel) ** 2))),
        "angular_accel_rmse_rads2": float(np.sqrt(np.mean((pred_ang - obs_ang) ** 2))),
    }


# --- built-in maneuvers ---

def _clip01(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def throttle_sweep(duration: float = 26.0, hover: float = 0.66, lo: float = 0.12,
                   hi: float = 0.95, period: float = 12.0, accel_sigma: float = 0.0,
                   gyro_sigma: float = 0.0, seed: int = 0) -> ExcitationScript:
    """Collective-throttle triangle waves for the thrust curve and the delay.

    The command ramps between lo and hi with no jumps: the wave enters and
    leaves at the hover level, and up/down legs are balanced so a small
    error in the assumed delay shifts the reconstructed speed by +c on one
    leg and -c on the other, cancelling its effect on the curve fit to first
    order. Opening and closing hovers give the hover analysis exact force
    balance. All four motors share the command, so only a lumped curve is
    identifiable from this maneuver alone.
    """
    slope = 2.0 * (hi - lo) / period
    # phase offset so the wave starts at the hover level on a rising leg
    t0 = (hover - lo) / slope

    def tri(tau: float) -> float:
        x = math.fmod(tau, period) / period
        return lo + (hi - lo) * (2.0 * x if x < 0.5 else 2.0 - 2.0 * x)

    def sp(t: float) -> tuple[float, float, float, float]:
        if t < 1.0 or t >= duration - 1.0:
            v = hover
        else:
            v = tri(t - 1.0 + t0)
        v = _clip01(v)
        return (v, v, v, v)

    return ExcitationScript(name="throttle_sweep", duration=duration, setpoint=sp,
                            accel_sigma=accel_sigma, gyro_sigma=gyro_sigma, seed=seed)


def _square(t: float, period: float) -> float:
    return 1.0 if math.fmod(t, period) < period / 2.0 else -1.0


def roll_pitch_excite(duration: float = 20.0, hover: float = 0.66, amp: float = 0.01,
                      accel_sigma: float = 0.0, gyro_sigma: float = 0.0,
                      seed: int = 1) -> ExcitationScript:
    """Differential square-wave bursts: roll first, then pitch.

    The burst patterns are balanced across spin directions, so the yaw drive
    stays zero and each burst excites exactly one axis; quadratic curve terms
    cancel in the thrust differences.
    """
    def sp(t: float) -> tuple[float, float, float, float]:
        if 1.0 <= t < 9.0:
            d = amp * _square(t - 1.0, 1.0)
            delta = (d, -d, -d, d)     # torque about +x
        elif 11.0 <= t < 19.0:
            d = amp * _square(t - 11.0, 1.0)
            delta = (d, d, -d, -d)     # torque about -y
        else:
            delta = (0.0, 0.0, 0.0, 0.0)
        return tuple(_clip01(hover + dd) for dd in delta)

    return ExcitationScript(name="roll_pitch_excite", duration=duration, setpoint=sp,
                            accel_sigma=accel_sigma, gyro_sigma=gyro_sigma, seed=seed)


def yaw_excite(duration: float = 14.0, hover: float = 0.66, amp: float = 0.08,
               accel_sigma: float = 0.0, gyro_sigma: float = 0.0,
               seed: int = 2) -> ExcitationScript:
    """Differential bursts between the CW and CCW pairs: pure yaw torque."""
    def sp(t: float) -> tuple[float, float, float, float]:
        if 1.0 <= t < 11.0:
            d = amp * _square(t - 1.0, 1.0)
            delta = (-d, d, -d, d)
        else:
            delta = (0.0, 0.0, 0.0, 0.0)
        return tuple(_clip01(hover + dd) for dd in delta)

    return ExcitationScript(name="yaw_excite", duration=duration, setpoint=sp,
                            accel_sigma=accel_sigma, gyro_sigma=gyro_sigma, seed=seed)


def standard_suite(accel_sigma: float = 0.0, gyro_sigma: float = 0.0,
                   seed: int = 0) -> list[ExcitationScript]:
    """The three maneuvers back to back: 60 s total at the default durations."""
    return [
        throttle_sweep(accel_sigma=accel_sigma, gyro_sigma=gyro_sigma, seed=seed),
        roll_pitch_excite(accel_sigma=accel_sigma, gyro_sigma=gyro_sigma, seed=seed + 1),
        yaw_excite(accel_sigma=accel_sigma, gyro_sigma=gyro_sigma, seed=seed + 2),
    ]


BUILTIN_SCRIPTS = {
    "throttle_sweep": lambda **kw: throttle_sweep(**kw),
    "roll_pitch_excite": lambda **kw: roll_pitch_excite(**kw),
    "yaw_excite": lambda **kw: yaw_excite(**kw),
    "standard_suite": lambda **kw: standard_suite(**kw),
}


def crazyflie_params() -> QuadrotorParams:
    """Plausible micro-quad parameter set used as the simulation default."""
    return QuadrotorParams(
        geometry=crazyflie_geometry(),
        inertia=(1.067e-5, 1.067e-5, 1.955e-5),
        time_constant=0.072,
        thrust_curve=ThrustCurve(coeffs=np.array([[0.0213, -0.0112, 0.1201]]), lumped=True),
        k_tau=4.548e-3,
    )
