import dataclasses
import math

import numpy as np
import pytest

from quadsysid.errors import TooShort, UnstableStep
from quadsysid.motor import ThrustCurve, predict_thrust, simulate_motor_speeds
from quadsysid.sim import (
    ExcitationScript,
    QuadrotorParams,
    SimState,
    crazyflie_params,
    measure,
    roll_pitch_excite,
    run_script,
    standard_suite,
    step,
    throttle_sweep,
    validate,
    yaw_excite,
)
from quadsysid.types import crazyflie_geometry


def _zero_thrust_params(inertia=(1.4e-5, 1.4e-5, 2.4e-5)):
    return QuadrotorParams(
        geometry=crazyflie_geometry(),
        inertia=inertia,
        time_constant=0.072,
        thrust_curve=ThrustCurve(coeffs=np.zeros((1, 3)), lumped=True),
        k_tau=0.0,
    )


class TestQuadrotorParams:
    def test_rejects_nonpositive_inertia(self):
        with pytest.raises(ValueError):
            dataclasses.replace(crazyflie_params(), inertia=(1e-5, 0.0, 1e-5))

    def test_rejects_nonpositive_time_constant(self):
        with pytest.raises(ValueError):
            dataclasses.replace(crazyflie_params(), time_constant=-0.1)


class TestStep:
    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            step(SimState.at_rest(), (0.5,) * 4, crazyflie_params(), 0.0)

    def test_rejects_dt_above_half_time_constant(self):
        with pytest.raises(UnstableStep):
            step(SimState.at_rest(), (0.5,) * 4, crazyflie_params(), 0.04)

    def test_motor_update_closed_form(self):
        params = crazyflie_params()
        state = SimState.at_rest(motor_speeds=(0.2, 0.3, 0.4, 0.5))
        u = (0.8, 0.7, 0.6, 0.5)
        new = step(state, u, params, 0.001)
        alpha = math.exp(-0.001 / params.time_constant)
        for i in range(4):
            expected = (1.0 - alpha) * u[i] + alpha * state.motor_speeds[i]
            assert new.motor_speeds[i] == pytest.approx(expected, rel=1e-15)

    def test_setpoints_clipped_to_unit_interval(self):
        params = crazyflie_params()
        state = SimState.at_rest(motor_speeds=(0.5,) * 4)
        high = step(state, (1.5,) * 4, params, 0.001)
        capped = step(state, (1.0,) * 4, params, 0.001)
        assert high.motor_speeds == capped.motor_speeds

    def test_quaternion_stays_unit(self):
        params = crazyflie_params()
        state = dataclasses.replace(SimState.at_rest(motor_speeds=(0.6,) * 4),
                                    body_rates=(1.0, -2.0, 0.5))
        for _ in range(500):
            state = step(state, (0.55, 0.65, 0.6, 0.7), params, 0.001)
            q = state.orientation
            assert abs(sum(c * c for c in q) - 1.0) <= 1e-12


class TestFreeFall:
    def test_gravity_only_kinematics_exact(self):
        params = _zero_thrust_params()
        state = SimState.at_rest()
        n, dt = 1000, 0.001
        for _ in range(n):
            state = step(state, (0.0,) * 4, params, dt)
        t = n * dt
        assert state.velocity[2] == pytest.approx(-9.81 * t, rel=1e-12)
        assert state.position[2] == pytest.approx(-0.5 * 9.81 * t * t, rel=1e-12)
        assert state.velocity[0] == 0.0 and state.velocity[1] == 0.0
        assert state.orientation == (1.0, 0.0, 0.0, 0.0)


class TestTorqueFreeRotation:
    def test_symmetric_body_precession(self):
        # analytic solution: spin about z constant, transverse rates rotate at
        # (Jx - Jz)/Jx * wz for an axisymmetric body under zero torque
        jx, jz = 1.4e-5, 2.4e-5
        params = _zero_thrust_params(inertia=(jx, jx, jz))
        w0 = (3.0, 0.0, 10.0)
        state = dataclasses.replace(SimState.at_rest(), body_rates=w0)
        n, dt = 1000, 0.001
        for _ in range(n):
            state = step(state, (0.0,) * 4, params, dt)
        rate = (jx - jz) / jx * w0[2]
        t = n * dt
        assert state.body_rates[2] == pytest.approx(10.0, abs=1e-12)
        mag = math.hypot(state.body_rates[0], state.body_rates[1])
        assert mag == pytest.approx(3.0, abs=1e-9)
        assert state.body_rates[0] == pytest.approx(3.0 * math.cos(rate * t), abs=1e-6)
        assert state.body_rates[1] == pytest.approx(-3.0 * math.sin(rate * t), abs=1e-6)


class TestIntegrationOrder:
    @staticmethod
    def _final_state(dt, total=0.2):
        params = crazyflie_params()
        speeds = (0.5, 0.6, 0.7, 0.55)
        state = dataclasses.replace(SimState.at_rest(motor_speeds=speeds),
                                    body_rates=(2.0, -1.0, 3.0))
        for _ in range(int(round(total / dt))):
            # commanding the current speeds keeps forces constant in time
            state = step(state, speeds, params, dt)
        return np.array(state.orientation + state.body_rates)

    def test_fourth_order_convergence(self):
        ref = self._final_state(0.0001)
        err_coarse = np.linalg.norm(self._final_state(0.004) - ref)
        err_fine = np.linalg.norm(self._final_state(0.002) - ref)
        ratio = err_coarse / err_fine
        assert 12.8 <= ratio <= 19.2


class TestMeasure:
    def test_specific_force_and_rates(self):
        params = crazyflie_params()
        speeds = (0.4, 0.5, 0.6, 0.7)
        state = dataclasses.replace(SimState.at_rest(motor_speeds=speeds),
                                    body_rates=(0.1, 0.2, 0.3))
        accel, gyro = measure(state, None, params, 0.001)
        forces = predict_thrust(params.thrust_curve, np.array(speeds))
        expected = (forces @ params.geometry.rotor_force_axes) / params.geometry.mass
        assert np.allclose(accel, expected, rtol=1e-12)
        assert np.allclose(gyro, [0.1, 0.2, 0.3], atol=0)

    def test_noise_reproducible_from_seed(self):
        params = crazyflie_params()
        state = SimState.at_rest(motor_speeds=(0.6,) * 4)
        a1, g1 = measure(state, None, params, 0.001, noise=(0.1, 0.01),
                         rng=np.random.default_rng(5))
        a2, g2 = measure(state, None, params, 0.001, noise=(0.1, 0.01),
                         rng=np.random.default_rng(5))
        assert np.array_equal(a1, a2) and np.array_equal(g1, g2)
        clean, _ = measure(state, None, params, 0.001)
        assert not np.array_equal(a1, clean)


class TestRunScript:
    def test_deterministic(self):
        params = crazyflie_params()
        script = throttle_sweep(duration=2.0, accel_sigma=0.1, seed=3)
        d1 = run_script(script, params, 0.001)
        d2 = run_script(script, params, 0.001)
        assert np.array_equal(d1.accel, d2.accel)
        assert np.array_equal(d1.gyro, d2.gyro)
        assert np.array_equal(d1.setpoints, d2.setpoints)

    def test_segments_cover_suite(self):
        params = crazyflie_params()
        ds = run_script(standard_suite(), params, 0.01)
        assert ds.segment_labels() == ["throttle_sweep", "roll_pitch_excite", "yaw_excite"]
        assert ds.segments[0][1] == 0
        for (_, _, end), (_, start, _) in zip(ds.segments, ds.segments[1:]):
            assert end == start
        assert ds.segments[-1][2] == ds.n_samples
        assert ds.n_samples == round(60.0 / 0.01)

    def test_motor_channel_matches_filter_reconstruction(self):
        params = crazyflie_params()
        ds = run_script(throttle_sweep(duration=3.0), params, 0.001)
        speeds = simulate_motor_speeds(ds.setpoints, params.time_constant, ds.dt,
                                       ds.setpoints[0])
        forces = predict_thrust(params.thrust_curve, speeds)
        accel = (forces @ params.geometry.rotor_force_axes) / params.geometry.mass
        assert np.abs(accel - ds.accel).max() <= 1e-13

    def test_angular_channel_matches_euler_equation(self):
        params = crazyflie_params()
        ds = run_script(yaw_excite(duration=3.0), params, 0.001)
        assert ds.angular_accel is not None
        speeds = simulate_motor_speeds(ds.setpoints, params.time_constant, ds.dt,
                                       ds.setpoints[0])
        forces = predict_thrust(params.thrust_curve, speeds)
        geom = params.geometry
        torques = forces @ geom.torque_arms + params.k_tau * (forces @ geom.rotor_torque_axes)
        jx, jy, jz = params.inertia
        w = ds.gyro
        expected = np.column_stack([
            (torques[:, 0] + (jy - jz) * w[:, 1] * w[:, 2]) / jx,
            (torques[:, 1] + (jz - jx) * w[:, 2] * w[:, 0]) / jy,
            (torques[:, 2] + (jx - jy) * w[:, 0] * w[:, 1]) / jz,
        ])
        assert np.abs(expected - ds.angular_accel).max() <= 1e-8

    def test_noise_statistics(self):
        params = crazyflie_params()
        clean = run_script(throttle_sweep(duration=5.0), params, 0.001)
        noisy = run_script(throttle_sweep(duration=5.0, accel_sigma=0.1, gyro_sigma=0.01),
                           params, 0.001)
        accel_noise = noisy.accel - clean.accel
        gyro_noise = noisy.gyro - clean.gyro
        assert accel_noise.std() == pytest.approx(0.1, rel=0.05)
        assert gyro_noise.std() == pytest.approx(0.01, rel=0.05)
        assert abs(accel_noise.mean()) < 0.005

    def test_duration_shorter_than_sample_rejected(self):
        with pytest.raises(TooShort):
            run_script(throttle_sweep(duration=0.0005), crazyflie_params(), 0.001)

    def test_coarse_dt_rejected_up_front(self):
        with pytest.raises(UnstableStep):
            run_script(throttle_sweep(duration=2.0), crazyflie_params(), 0.05)

    def test_blowup_names_script(self):
        # equal commands keep huge forces torque-free, so the overflow needs a
        # differential burst: speeds split, the torque explodes, rates go inf
        params = QuadrotorParams(
            geometry=crazyflie_geometry(),
            inertia=(1e-5, 2e-5, 3e-5),
            time_constant=0.072,
            thrust_curve=ThrustCurve(coeffs=np.array([[0.0, 0.0, 1e200]]), lumped=True),
            k_tau=1e-3,
        )
        with pytest.raises(UnstableStep, match="roll_pitch_excite"):
            run_script(roll_pitch_excite(duration=3.0), params, 0.001)

    def test_empty_script_list_rejected(self):
        with pytest.raises(ValueError):
            run_script([], crazyflie_params(), 0.001)


class TestBuiltinScripts:
    def test_throttle_sweep_is_continuous(self):
        script = throttle_sweep()
        dt = 0.001
        values = [script.setpoint(k * dt)[0] for k in range(int(script.duration / dt))]
        jumps = np.abs(np.diff(values))
        slope = 2.0 * (0.95 - 0.12) / 12.0
        assert jumps.max() <= slope * dt * 1.01
        assert values[0] == pytest.approx(0.66, abs=1e-12)
        assert values[-1] == pytest.approx(0.66, abs=1e-12)

    def test_throttle_sweep_commands_within_bounds(self):
        script = throttle_sweep()
        values = np.array([script.setpoint(t) for t in np.arange(0, script.duration, 0.01)])
        assert values.min() >= 0.119
        assert values.max() <= 0.951
        assert np.all(values == values[:, :1])  # collective: all motors equal

    def test_roll_pitch_balances_yaw_drive(self):
        script = roll_pitch_excite()
        geom = crazyflie_geometry()
        for t in np.arange(0.0, script.duration, 0.05):
            u = np.array(script.setpoint(t))
            assert u @ geom.rotor_torque_axes[:, 2] == pytest.approx(0.0, abs=1e-12)

    def test_yaw_excite_balances_roll_pitch(self):
        script = yaw_excite()
        geom = crazyflie_geometry()
        for t in np.arange(0.0, script.duration, 0.05):
            u = np.array(script.setpoint(t))
            tau = u @ geom.torque_arms
            assert abs(tau[0]) <= 1e-12 and abs(tau[1]) <= 1e-12

    def test_suite_duration(self):
        suite = standard_suite()
        assert sum(s.duration for s in suite) == pytest.approx(60.0)

    def test_invalid_script_parameters_rejected(self):
        with pytest.raises(ValueError):
            ExcitationScript(name="x", duration=0.0, setpoint=lambda t: (0,) * 4)
        with pytest.raises(ValueError):
            ExcitationScript(name="x", duration=1.0, setpoint=lambda t: (0,) * 4,
                             accel_sigma=-0.1)


class TestValidate:
    def test_true_parameters_fit_noiseless_data(self):
        params = crazyflie_params()
        ds = run_script(throttle_sweep(duration=4.0), params, 0.001)
        report = validate(ds, params)
        assert report["accel_rmse_ms2"] <= 1e-9
        assert report["angular_accel_rmse_rads2"] <= 1e-6

    def test_wrong_time_constant_scores_worse(self):
        params = crazyflie_params()
        ds = run_script(throttle_sweep(duration=4.0), params, 0.001)
        wrong = dataclasses.replace(params, time_constant=0.3)
        assert validate(ds, wrong)["accel_rmse_ms2"] > 100 * validate(ds, params)["accel_rmse_ms2"]

    def test_works_without_logged_angular_channel(self):
        params = crazyflie_params()
        ds = run_script(roll_pitch_excite(duration=4.0), params, 0.001)
        ds.angular_accel = None
        report = validate(ds, params)
        # differentiated gyro is only second-order accurate, so the residual
        # is small but not machine precision
        assert report["angular_accel_rmse_rads2"] < 5.0
