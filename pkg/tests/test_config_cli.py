import json

import numpy as np
import numpy.testing as npt
import pytest

import ptzgs.cli as cli
from ptzgs import runner
from ptzgs.config import build_config, load_config
from ptzgs.errors import DisconnectedGraph, ParseError, ValidationError
from ptzgs.presets import PAPER_SEC4, preset_config, preset_dict


def tiny_config_dict(variant="ss"):
    cfg = {
        "variant": variant,
        "graph": {"n": 3, "edges": [[1, 2], [2, 3]]},
        "objectives": [
            {"Q": [[1.0, 0.0], [0.0, 1.0]], "center": [1.0, 0.0]},
            {"Q": [[2.0, 0.0], [0.0, 1.0]], "center": [-1.0, 1.0]},
            {"Q": [[1.0, 0.2], [0.2, 1.5]], "center": [0.0, -1.0], "offset": 0.3},
        ],
        "params": {"kappa1": 2.0, "kappa2": 3.0, "c": 1.0},
        "schedule": {"T1": 0.05, "h1": 2.0},
        "integrator": {"base_step": 2e-4},
        "seed": 5,
    }
    if variant == "ms":
        cfg["schedule"] = {"T1": 0.03, "h1": 2.0, "T2": 0.03, "h2": 2.0}
    return cfg


def envelope_breaking_config_dict():
    """Two-stage scenario whose stage-2 envelope genuinely fails.

    On a triangle (lambda2 = 3) the envelope exponent is steep enough that
    the theoretical bound drops below the floor left by the imperfect
    stage-1 surface collapse (||sum grad f|| ~ 1e-7 at the boundary, not
    exactly 0), so the run reports an envelope violation.
    """
    cfg = tiny_config_dict("ms")
    cfg["graph"] = {"n": 3, "edges": [[1, 2], [2, 3], [3, 1]]}
    return cfg


def write_config(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


class TestPresets:
    def test_ss_parameter_table(self):
        cfg = preset_config(PAPER_SEC4, "ss")
        assert cfg.params.kappa1 == 2.0
        assert cfg.params.kappa2 == 3.0
        assert cfg.params.c == 1.0
        assert cfg.schedule.stages[0].duration == pytest.approx(0.3)
        assert cfg.schedule.stages[0].exponent == pytest.approx(2.3)
        assert cfg.schedule.n_stages == 1
        assert cfg.n_agents == 6

    def test_ms_parameter_table(self):
        cfg = preset_config(PAPER_SEC4, "ms")
        s1, s2 = cfg.schedule.stages
        assert (s1.duration, s1.exponent) == (pytest.approx(0.1), pytest.approx(3.0))
        assert (s2.duration, s2.exponent) == (pytest.approx(0.2), pytest.approx(2.5))
        assert s2.t_start == pytest.approx(0.1)

    def test_initial_conditions_inside_box(self):
        cfg = preset_config(PAPER_SEC4, "ss")
        assert np.all(cfg.initial_x >= -5.0) and np.all(cfg.initial_x <= 5.0)
        assert cfg.initial_x.shape == (6, 2)

    def test_seed_controls_initial_conditions(self):
        a = preset_config(PAPER_SEC4, "ss", seed=1)
        b = preset_config(PAPER_SEC4, "ss", seed=2)
        c = preset_config(PAPER_SEC4, "ss", seed=1)
        assert not np.array_equal(a.initial_x, b.initial_x)
        npt.assert_array_equal(a.initial_x, c.initial_x)

    def test_unknown_preset_rejected(self):
        with pytest.raises(ValueError):
            preset_dict("nonexistent", "ss")


class TestConfigValidation:
    def test_roundtrip_through_file(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        cfg = load_config(path)
        assert cfg.variant == "ss"
        assert cfg.n_agents == 3
        assert cfg.dim == 2
        assert cfg.name == "scenario"

    def test_build_is_deterministic(self):
        a = build_config(tiny_config_dict())
        b = build_config(tiny_config_dict())
        npt.assert_array_equal(a.initial_x, b.initial_x)

    def test_ss_forbids_second_stage(self):
        data = tiny_config_dict()
        data["schedule"]["T2"] = 0.1
        with pytest.raises(ValidationError, match="forbids"):
            build_config(data)

    def test_ms_requires_second_stage(self):
        data = tiny_config_dict("ms")
        del data["schedule"]["T2"]
        with pytest.raises(ValidationError, match="requires"):
            build_config(data)

    def test_unknown_top_level_key(self):
        data = tiny_config_dict()
        data["extra"] = 1
        with pytest.raises(ValidationError, match="unknown config field"):
            build_config(data)

    def test_missing_required_field(self):
        data = tiny_config_dict()
        del data["params"]
        with pytest.raises(ValidationError, match="params"):
            build_config(data)

    def test_objective_count_mismatch(self):
        data = tiny_config_dict()
        data["objectives"] = data["objectives"][:2]
        with pytest.raises(ValidationError, match="objectives"):
            build_config(data)

    def test_non_spd_objective(self):
        data = tiny_config_dict()
        data["objectives"][0]["Q"] = [[1.0, 0.0], [0.0, -1.0]]
        with pytest.raises(ValidationError, match="positive definite"):
            build_config(data)

    def test_disconnected_graph(self):
        data = tiny_config_dict()
        data["graph"] = {"n": 4, "edges": [[1, 2], [3, 4]]}
        data["objectives"].append({"Q": [[1.0, 0.0], [0.0, 1.0]], "center": [0.0, 0.0]})
        with pytest.raises(DisconnectedGraph):
            build_config(data)

    def test_explicit_initial_vectors(self):
        data = tiny_config_dict()
        data["initial_x"] = [[0.0, 0.0], [1.0, 1.0], [2.0, -1.0]]
        cfg = build_config(data)
        npt.assert_array_equal(cfg.initial_x, data["initial_x"])

    def test_initial_vectors_shape_checked(self):
        data = tiny_config_dict()
        data["initial_x"] = [[0.0, 0.0], [1.0, 1.0]]
        with pytest.raises(ValidationError, match="initial_x"):
            build_config(data)

    def test_bad_box(self):
        data = tiny_config_dict()
        data["initial_x"] = {"box": [2.0, -2.0]}
        with pytest.raises(ValidationError, match="box"):
            build_config(data)

    def test_seed_must_be_int(self):
        data = tiny_config_dict()
        data["seed"] = "abc"
        with pytest.raises(ValidationError, match="seed"):
            build_config(data)

    def test_nonpositive_gain(self):
        data = tiny_config_dict()
        data["params"]["c"] = 0.0
        with pytest.raises(ValidationError, match="c must be"):
            build_config(data)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"variant": "ss",\n  bad\n}')
        with pytest.raises(ParseError, match="line 2"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "nope.json")


class TestRunnerOutputs:
    def test_run_writes_csv_with_one_row_per_sample(self, tmp_path):
        cfg = build_config(tiny_config_dict())
        csv_path = tmp_path / "out.csv"
        result = runner.run(cfg, csv_path=csv_path)
        lines = csv_path.read_text().splitlines()
        assert len(lines) == result.trajectory.n_samples + 1
        header = lines[0].split(",")
        assert header[0] == "t"
        assert header[1] == "x1_1"
        assert header[-1] == "zgs2_norm"
        assert len(header) == 1 + 3 * 2 + 3 + 3 + 5

    def test_report_contents(self):
        cfg = build_config(tiny_config_dict())
        result = runner.run(cfg)
        rep = result.report
        assert rep.final_er.shape == (3,)
        assert rep.envelope_passed
        assert rep.time_to_target is not None
        assert 0 < rep.time_to_target <= cfg.schedule.final_deadline
        assert rep.n_samples == result.trajectory.n_samples
        assert "envelope" in rep.summary()

    def test_ms_variant_runs(self):
        cfg = build_config(tiny_config_dict("ms"))
        result = runner.run(cfg)
        assert result.report.final_er.max() < 1e-4
        assert result.report.envelope_passed

    def test_scalar_dimension_scenario(self):
        data = tiny_config_dict()
        data["objectives"] = [
            {"Q": [[1.0]], "center": [1.0]},
            {"Q": [[2.0]], "center": [-1.0]},
            {"Q": [[1.5]], "center": [0.5]},
        ]
        cfg = build_config(data)
        assert cfg.dim == 1
        result = runner.run(cfg)
        assert result.report.final_er.max() < 1e-6
        assert result.report.envelope_passed


class TestCli:
    def test_check_ok(self, tmp_path, capsys):
        path = write_config(tmp_path, tiny_config_dict())
        assert cli.main(["check", "--config", str(path)]) == 0
        assert "OK" in capsys.readouterr().out

    def test_check_invalid_config(self, tmp_path, capsys):
        data = tiny_config_dict()
        data["schedule"]["T2"] = 0.1
        path = write_config(tmp_path, data)
        assert cli.main(["check", "--config", str(path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_check_missing_file(self, tmp_path):
        assert cli.main(["check", "--config", str(tmp_path / "missing.json")]) == 2

    def test_run_produces_outputs(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out = tmp_path / "out"
        assert cli.main(["run", "--config", str(path), "--out-dir", str(out)]) == 0
        assert (out / "trajectory.csv").exists()
        report = json.loads((out / "report.json").read_text())
        assert report["envelope_passed"] is True
        n_rows = len((out / "trajectory.csv").read_text().splitlines()) - 1
        assert n_rows == report["n_samples"]
        for stem in ("states", "residuals", "surfaces", "function_error"):
            png = out / f"{stem}.png"
            assert png.exists() and png.stat().st_size > 0

    def test_run_no_plots(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict("ms"))
        out = tmp_path / "out"
        assert cli.main(["run", "--config", str(path), "--out-dir", str(out), "--no-plots"]) == 0
        assert (out / "trajectory.csv").exists()
        assert not (out / "states.png").exists()

    def test_run_rerun_is_byte_identical(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        out1, out2 = tmp_path / "a", tmp_path / "b"
        cli.main(["run", "--config", str(path), "--out-dir", str(out1), "--no-plots"])
        cli.main(["run", "--config", str(path), "--out-dir", str(out2), "--no-plots"])
        assert (out1 / "trajectory.csv").read_bytes() == (out2 / "trajectory.csv").read_bytes()

    def test_preset_subcommand(self, tmp_path):
        out = tmp_path / "preset-out"
        code = cli.main([
            "preset", PAPER_SEC4, "--algorithm", "ss",
            "--out-dir", str(out), "--no-plots", "--seed", "42",
        ])
        assert code == 0
        assert (out / "trajectory.csv").exists()

    def test_sweep(self, tmp_path):
        cfg_dir = tmp_path / "configs"
        cfg_dir.mkdir()
        write_config(cfg_dir, tiny_config_dict(), "a.json")
        write_config(cfg_dir, tiny_config_dict("ms"), "b.json")
        out = tmp_path / "sweep"
        code = cli.main(["sweep", "--config-dir", str(cfg_dir), "--out-dir", str(out), "--jobs", "2"])
        assert code == 0
        assert (out / "a" / "trajectory.csv").exists()
        assert (out / "b" / "trajectory.csv").exists()

    def test_sweep_empty_dir(self, tmp_path):
        empty = tmp_path / "none"
        empty.mkdir()
        assert cli.main(["sweep", "--config-dir", str(empty)]) == 2

    def test_envelope_violation_exit_code(self, tmp_path):
        path = write_config(tmp_path, envelope_breaking_config_dict())
        out = tmp_path / "v"
        code = cli.main(["run", "--config", str(path), "--out-dir", str(out), "--no-plots"])
        assert code == 3
        # outputs are still written so the violation can be inspected
        report = json.loads((out / "report.json").read_text())
        assert report["envelope_passed"] is False
        assert report["envelope_max_ratio"] > 1.01
