import numpy as np
import pytest

from quadsysid.pipeline import PipelineConfig, SegmentWindow, run_pipeline
from quadsysid.sim import (crazyflie_params, roll_pitch_excite, run_script,
                           standard_suite, throttle_sweep, yaw_excite)
from quadsysid.ulog import write_dataset_ulog

# accel sigma m/s^2, gyro sigma rad/s for the noisy round trip
NOISE = (0.1, 0.01)

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion and assert it."""
    def check(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def planted_params():
    return crazyflie_params()


@pytest.fixture(scope="session")
def suite_dataset(planted_params):
    return run_script(standard_suite(), planted_params, 0.001)


@pytest.fixture(scope="session")
def noisy_suite_dataset(planted_params):
    return run_script(standard_suite(*NOISE, seed=0), planted_params, 0.001)


@pytest.fixture(scope="session")
def suite_ulog(suite_dataset):
    return write_dataset_ulog(suite_dataset)


@pytest.fixture(scope="session")
def suite_config():
    return PipelineConfig(segments=(
        SegmentWindow("linear", 0, 0.0, 26.0),
        SegmentWindow("roll_pitch", 0, 26.0, 46.0),
        SegmentWindow("yaw", 0, 46.0, 60.0),
    ))


@pytest.fixture(scope="session")
def suite_config_dict():
    return {
        "segments": [
            {"label": "linear", "log": 0, "start_s": 0.0, "end_s": 26.0},
            {"label": "roll_pitch", "log": 0, "start_s": 26.0, "end_s": 46.0},
            {"label": "yaw", "log": 0, "start_s": 46.0, "end_s": 60.0},
        ],
    }


@pytest.fixture(scope="session")
def suite_report(suite_config, suite_ulog):
    return run_pipeline(suite_config, [("suite.ulg", suite_ulog)])


# shorter maneuver set for tests that only need pipeline plumbing; the segment
# windows are (label -> (start_s, end_s))
MINI_WINDOWS = {"linear": (0.0, 14.0), "roll_pitch": (14.0, 34.0), "yaw": (34.0, 46.0)}


@pytest.fixture(scope="session")
def mini_dataset(planted_params):
    scripts = [throttle_sweep(duration=14.0), roll_pitch_excite(), yaw_excite(duration=12.0)]
    return run_script(scripts, planted_params, 0.001)


@pytest.fixture(scope="session")
def mini_ulog(mini_dataset):
    return write_dataset_ulog(mini_dataset)


def mini_config(labels=("linear", "roll_pitch", "yaw"), **overrides) -> PipelineConfig:
    segments = tuple(SegmentWindow(label, 0, *MINI_WINDOWS[label]) for label in labels)
    overrides.setdefault("sweep_points", 40)
    return PipelineConfig(segments=segments, **overrides)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
