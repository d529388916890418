"""Command line behavior: subcommands, exit codes, output routing."""

import json

import numpy as np
import pytest

from conftest import mini_config
from quadsysid._version import __version__
from quadsysid.cli import STAGE_EXIT_CODES, main
from quadsysid.pipeline import PLOT_KINDS, dump_json
from quadsysid.sim import run_script, throttle_sweep
from quadsysid.types import SysIdDataset
from quadsysid.ulog import parse_ulog, write_dataset_ulog


@pytest.fixture(scope="module")
def cli_root(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def mini_log(cli_root, mini_ulog):
    path = cli_root / "mini.ulg"
    path.write_bytes(mini_ulog)
    return path


@pytest.fixture(scope="module")
def mini_config_path(cli_root):
    path = cli_root / "config.json"
    path.write_text(dump_json(mini_config().to_dict()), encoding="utf-8")
    return path


def _write_config(path, config_dict):
    path.write_text(dump_json(config_dict), encoding="utf-8")
    return path


class TestIdentify:
    def test_report_to_stdout(self, mini_log, mini_config_path, capsys):
        code = main(["identify", "--config", str(mini_config_path), str(mini_log)])
        captured = capsys.readouterr()
        assert code == 0
        report = json.loads(captured.out)
        assert report["motor"]["time_constant_s"] == pytest.approx(0.072, rel=0.2)
        assert captured.err == ""

    def test_out_file_and_plots_dir(self, mini_log, mini_config_path, cli_root, capsys):
        out = cli_root / "report.json"
        plots = cli_root / "plots"
        code = main(["identify", "--config", str(mini_config_path), str(mini_log),
                     "--out", str(out), "--plots-dir", str(plots)])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out == ""
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["inertia"]["izz_kg_m2"] == pytest.approx(1.955e-5, rel=0.05)
        for kind in PLOT_KINDS:
            text = (plots / f"{kind}.csv").read_text(encoding="utf-8")
            assert text.count("\n") >= 2

    def test_warnings_go_to_stderr(self, mini_log, cli_root, capsys):
        cfg = _write_config(cli_root / "no_yaw.json",
                            mini_config(labels=("linear", "roll_pitch")).to_dict())
        code = main(["identify", "--config", str(cfg), str(mini_log)])
        captured = capsys.readouterr()
        assert code == 0
        assert "warning:" in captured.err
        assert "yaw segment missing" in captured.err
        report = json.loads(captured.out)
        assert "izz_kg_m2" not in report["inertia"]

    def test_missing_config_file(self, mini_log, capsys):
        code = main(["identify", "--config", "/no/such/config.json", str(mini_log)])
        assert code == 2
        assert "cannot read config" in capsys.readouterr().err

    def test_config_not_json(self, mini_log, cli_root, capsys):
        cfg = cli_root / "broken.json"
        cfg.write_text("{nope", encoding="utf-8")
        code = main(["identify", "--config", str(cfg), str(mini_log)])
        assert code == 2
        assert "not valid JSON" in capsys.readouterr().err

    def test_unknown_config_key(self, mini_log, cli_root, capsys):
        cfg = _write_config(cli_root / "unknown_key.json", {"blend": 1})
        code = main(["identify", "--config", str(cfg), str(mini_log)])
        assert code == 2
        assert "blend" in capsys.readouterr().err

    def test_missing_log_file(self, mini_config_path, capsys):
        code = main(["identify", "--config", str(mini_config_path), "/no/such.ulg"])
        assert code == STAGE_EXIT_CODES["ingest"]
        assert "cannot read log" in capsys.readouterr().err

    def test_unparseable_log(self, mini_config_path, cli_root, capsys):
        bad = cli_root / "bad.bin"
        bad.write_bytes(bytes([0xFF, 0xFE, 0x00, 0x99]) * 8)
        code = main(["identify", "--config", str(mini_config_path), str(bad)])
        assert code == STAGE_EXIT_CODES["ingest"]
        assert "[ingest]" in capsys.readouterr().err

    def test_missing_linear_segment(self, mini_log, cli_root, capsys):
        cfg = _write_config(cli_root / "no_linear.json",
                            mini_config(labels=("roll_pitch", "yaw")).to_dict())
        code = main(["identify", "--config", str(cfg), str(mini_log)])
        assert code == STAGE_EXIT_CODES["segments"]
        assert "[segments]" in capsys.readouterr().err

    def test_unexciting_log(self, cli_root, capsys):
        n = 2000
        ds = SysIdDataset(dt=0.001, t0=0.0,
                          accel=np.tile([0.0, 0.0, 6.7], (n, 1)),
                          gyro=np.zeros((n, 3)),
                          setpoints=np.full((n, 4), 0.5))
        flat = cli_root / "flat.ulg"
        flat.write_bytes(write_dataset_ulog(ds))
        cfg = _write_config(cli_root / "linear_only.json",
                            mini_config(labels=("linear",)).to_dict())
        code = main(["identify", "--config", str(cfg), str(flat)])
        assert code == STAGE_EXIT_CODES["sweep"]
        assert "[sweep]" in capsys.readouterr().err


class TestSimulate:
    def test_writes_ulog(self, cli_root, capsys):
        out = cli_root / "sim.ulg"
        code = main(["simulate", "--script", "throttle_sweep",
                     "--duration", "2.0", "--out", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        assert "wrote 2000 samples (throttle_sweep)" in captured.err
        log = parse_ulog(out.read_bytes())
        assert set(log.channels) == {"sensor_accel", "sensor_gyro", "actuator_motors"}
        assert log.channels["sensor_accel"][1].shape == (2000, 3)

    def test_writes_csv(self, cli_root, capsys):
        out = cli_root / "sim.csv"
        code = main(["simulate", "--script", "throttle_sweep",
                     "--duration", "1.0", "--out", str(out)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("t,acc.x")
        assert len(lines) == 1 + 1000

    def test_dt_override(self, cli_root, capsys):
        out = cli_root / "coarse.ulg"
        code = main(["simulate", "--script", "throttle_sweep", "--dt", "0.002",
                     "--duration", "1.0", "--out", str(out)])
        assert code == 0
        assert "wrote 500 samples" in capsys.readouterr().err

    def test_noise_reproducible_by_seed(self, cli_root, capsys):
        paths = [cli_root / f"noisy{k}.ulg" for k in range(3)]
        for path, seed in zip(paths, ("3", "3", "4")):
            assert main(["simulate", "--script", "throttle_sweep", "--duration", "1.0",
                         "--accel-noise", "0.1", "--gyro-noise", "0.01",
                         "--seed", seed, "--out", str(path)]) == 0
        capsys.readouterr()
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert paths[0].read_bytes() != paths[2].read_bytes()

    def test_unknown_script(self, cli_root, capsys):
        code = main(["simulate", "--script", "wobble", "--out", str(cli_root / "x.ulg")])
        assert code == 2
        err = capsys.readouterr().err
        assert "unknown script 'wobble'" in err
        assert "throttle_sweep" in err

    def test_config_defined_script(self, cli_root, capsys):
        cfg = _write_config(cli_root / "scripts.json", {
            "scripts": {"gentle": {"type": "throttle_sweep",
                                   "duration": 1.5, "hi": 0.7}}})
        out = cli_root / "gentle.ulg"
        code = main(["simulate", "--script", "gentle", "--config", str(cfg),
                     "--out", str(out)])
        captured = capsys.readouterr()
        assert code == 0
        assert "wrote 1500 samples" in captured.err
        setpoints = parse_ulog(out.read_bytes()).channels["actuator_motors"][1]
        assert setpoints.max() <= 0.7 + 1e-12

    def test_config_script_with_unknown_type(self, cli_root, capsys):
        cfg = _write_config(cli_root / "warp.json", {"scripts": {"x": {"type": "warp"}}})
        code = main(["simulate", "--script", "x", "--config", str(cfg),
                     "--out", str(cli_root / "x.ulg")])
        assert code == 2
        assert "unknown type 'warp'" in capsys.readouterr().err

    def test_config_script_with_bad_parameter(self, cli_root, capsys):
        cfg = _write_config(cli_root / "bogus.json",
                            {"scripts": {"x": {"type": "throttle_sweep", "bogus": 1}}})
        code = main(["simulate", "--script", "x", "--config", str(cfg),
                     "--out", str(cli_root / "x.ulg")])
        assert code == 2

    def test_simulation_failure_exits_1(self, cli_root, capsys):
        code = main(["simulate", "--script", "throttle_sweep", "--duration", "0.0005",
                     "--out", str(cli_root / "x.ulg")])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestSweep:
    def test_csv_to_stdout(self, mini_log, mini_config_path, capsys):
        code = main(["sweep", "--config", str(mini_config_path), str(mini_log)])
        captured = capsys.readouterr()
        assert code == 0
        lines = captured.out.strip().splitlines()
        assert lines[0] == "t_m_s,rmse"
        assert len(lines) == 1 + 40
        curve = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
        assert curve[0, 0] == pytest.approx(0.001)
        assert curve[-1, 0] == pytest.approx(1.0)
        best = curve[np.argmin(curve[:, 1]), 0]
        assert 0.05 <= best <= 0.1

    def test_json_whole_log(self, cli_root, planted_params, capsys):
        ds = run_script([throttle_sweep(duration=4.0)], planted_params, 0.001)
        log = cli_root / "short.ulg"
        log.write_bytes(write_dataset_ulog(ds))
        cfg = _write_config(cli_root / "segmentless.json",
                            {"sweep": {"points": 25, "t_min_s": 0.02, "t_max_s": 0.2}})
        code = main(["sweep", "--config", str(cfg), "--format", "json", str(log)])
        captured = capsys.readouterr()
        assert code == 0
        doc = json.loads(captured.out)
        assert doc["schema_version"] == "1"
        assert len(doc["sweep"]) == 25
        assert any(t == pytest.approx(doc["best_t_m_s"]) for t, _ in doc["sweep"])

    def test_output_file(self, mini_log, mini_config_path, cli_root, capsys):
        out = cli_root / "sweep.csv"
        code = main(["sweep", "--config", str(mini_config_path), str(mini_log),
                     "--out", str(out)])
        assert code == 0
        assert capsys.readouterr().out == ""
        assert out.read_text(encoding="utf-8").startswith("t_m_s,rmse\n")

    def test_missing_log(self, mini_config_path, capsys):
        code = main(["sweep", "--config", str(mini_config_path), "/no/such.ulg"])
        assert code == STAGE_EXIT_CODES["ingest"]
        assert "cannot read log" in capsys.readouterr().err


class TestParser:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "quadsysid" in out
        assert __version__ in out

    def test_subcommand_required(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2
