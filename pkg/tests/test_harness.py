"""Tests for experiment configuration, the runner registry, result files
and the command-line front end."""

import json
import math

import numpy as np
import pytest

from maxreg_lab import cli
from maxreg_lab.harness import (
    ConfigError,
    experiment_names,
    load_config,
    run_experiment,
    synthetic_forcing_ensemble,
    write_results,
)
from maxreg_lab import TorusGrid, uniform_time_grid


TINY_LIPSCHITZ = {"experiment": "lipschitz", "params": {"samples": 20_000}}

TINY_MAXREG = {
    "experiment": "maxreg",
    "grid": {"points_per_axis": 16},
    "time": {"horizon": 1.0, "num_nodes": 33},
    "params": {"ensemble_size": 4},
}


class TestConfigLoading:
    def test_defaults_are_filled(self):
        cfg = load_config({"experiment": "maxreg"})
        assert cfg.experiment == "maxreg"
        assert cfg.grid == {
            "dimension": 2,
            "points_per_axis": 64,
            "period": 2 * math.pi,
        }
        assert cfg.threads == 1
        assert cfg.params["p"] == 2.0
        assert cfg.params["ensemble_size"] == 20

    def test_experiment_specific_defaults_override_base(self):
        assert load_config({"experiment": "desimon"}).time["horizon"] == 8.0
        assert load_config({"experiment": "ns-unique"}).grid["dimension"] == 3
        assert load_config({"experiment": "nlhe-unique"}).grid["points_per_axis"] == 32

    def test_user_values_merge_without_clobbering(self):
        cfg = load_config({"experiment": "maxreg", "grid": {"points_per_axis": 16}})
        assert cfg.grid["points_per_axis"] == 16
        assert cfg.grid["dimension"] == 2  # untouched default survives

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key 'bogus'"):
            load_config({"experiment": "maxreg", "bogus": 1})
        with pytest.raises(ConfigError, match="unknown config key grid."):
            load_config({"experiment": "maxreg", "grid": {"spacing": 0.1}})

    def test_table_type_enforced(self):
        with pytest.raises(ConfigError, match="must be a table"):
            load_config({"experiment": "maxreg", "grid": 5})

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(TINY_MAXREG))
        cfg = load_config(path)
        assert cfg.time["num_nodes"] == 33

    def test_file_errors(self, tmp_path):
        with pytest.raises(ConfigError, match="config file not found"):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(bad)
        arr = tmp_path / "arr.json"
        arr.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="must be a JSON object"):
            load_config(arr)

    def test_experiment_name_required_and_known(self):
        with pytest.raises(ConfigError, match="must name an 'experiment'"):
            load_config({})
        with pytest.raises(ConfigError, match="unknown experiment 'turbulence'"):
            load_config({"experiment": "turbulence"})

    def test_numeric_validation_messages(self):
        cases = [
            ({"grid": {"points_per_axis": 48}}, "power of two"),
            ({"grid": {"dimension": 0}}, "dimension must be positive"),
            ({"time": {"horizon": -1.0}}, "horizon must be positive"),
            ({"time": {"num_nodes": 1}}, "at least 2"),
            ({"threads": 0}, "threads must be at least 1"),
            ({"params": {"p": 1.0}}, "params.p must exceed 1"),
            ({"params": {"q": math.inf}}, r"params.q must lie in \(1, inf\)"),
        ]
        for override, message in cases:
            with pytest.raises(ConfigError, match=message):
                load_config({"experiment": "maxreg", **override})
        with pytest.raises(ConfigError, match="params.mu must exceed 1/p"):
            load_config({"experiment": "weighted-maxreg", "params": {"mu": 0.2}})
        with pytest.raises(ConfigError, match="params.nu must exceed 1"):
            load_config({"experiment": "nlhe-exist", "params": {"nu": 1.0}})
        with pytest.raises(ConfigError, match="params.eta must be positive"):
            load_config({"experiment": "nlhe-unique", "params": {"eta": -1.0}})
        with pytest.raises(ConfigError, match="eta_grid entries must be nonnegative"):
            load_config({"experiment": "nlhe-exist", "params": {"eta_grid": [-0.1]}})

    def test_to_dict_round_trip_is_idempotent(self):
        cfg = load_config(TINY_MAXREG)
        again = load_config(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()

    def test_factory_methods(self):
        cfg = load_config(TINY_MAXREG)
        grid = cfg.make_grid()
        tg = cfg.make_time_grid()
        assert isinstance(grid, TorusGrid) and grid.points_per_axis == 16
        assert tg.num_nodes == 33 and tg.horizon == pytest.approx(1.0)

    def test_config_error_is_a_value_error(self):
        assert issubclass(ConfigError, ValueError)

    def test_all_experiments_listed(self):
        names = experiment_names()
        assert len(names) == 13
        for expected in ("maxreg", "desimon", "hormander", "ns-unique", "smoothing"):
            assert expected in names


class TestSyntheticEnsemble:
    def test_deterministic_and_member_distinct(self):
        grid = TorusGrid(dimension=2, points_per_axis=16)
        tg = uniform_time_grid(1.0, 17)
        a = synthetic_forcing_ensemble(grid, tg, 3, seed=4)
        b = synthetic_forcing_ensemble(grid, tg, 3, seed=4)
        for ta, tb in zip(a, b):
            np.testing.assert_array_equal(ta.coefficients, tb.coefficients)
        assert np.any(a[0].coefficients != a[1].coefficients)

    def test_members_are_real_and_band_limited(self):
        grid = TorusGrid(dimension=2, points_per_axis=16)
        tg = uniform_time_grid(1.0, 9)
        (member,) = synthetic_forcing_ensemble(grid, tg, 1, band_limit=2, seed=1)
        member.state(3).to_physical(require_real=True)  # no symmetry error
        k = np.fft.fftfreq(16, d=1 / 16)
        outside = np.abs(k) > 2
        assert np.all(member.coefficients[:, 0][:, outside, :] == 0)

    def test_node_refinement_keeps_shared_samples(self):
        """Doubling the time resolution re-evaluates the same envelopes."""
        grid = TorusGrid(dimension=1, points_per_axis=16)
        coarse_tg = uniform_time_grid(1.0, 9)
        fine_tg = uniform_time_grid(1.0, 17)
        (coarse,) = synthetic_forcing_ensemble(grid, coarse_tg, 1, seed=2)
        (fine,) = synthetic_forcing_ensemble(grid, fine_tg, 1, seed=2)
        np.testing.assert_allclose(
            fine.coefficients[::2], coarse.coefficients, atol=1e-15
        )


class TestRunExperiment:
    def test_lipschitz_record_shape(self):
        record = run_experiment(load_config(TINY_LIPSCHITZ))
        assert record.status == "pass"
        assert record.schema_version == 1
        assert record.wall_time_s > 0
        assert record.metrics["max_violation"] <= 0.0
        assert record.config["experiment"] == "lipschitz"
        assert record.series  # at least one table
        for table in record.series.values():
            assert table["columns"]
            assert all(len(r) == len(table["columns"]) for r in table["rows"])

    def test_maxreg_tiny_run_passes(self):
        record = run_experiment(load_config(TINY_MAXREG))
        assert record.status == "pass"
        assert 0 < record.metrics["C_estimate"] <= 1.05

    def test_reruns_are_reproducible(self):
        r1 = run_experiment(load_config(TINY_LIPSCHITZ))
        r2 = run_experiment(load_config(TINY_LIPSCHITZ))
        assert r1.metrics == r2.metrics
        assert r1.series == r2.series


class TestWriteResults:
    def test_files_written_and_parse_back(self, tmp_path):
        record = run_experiment(load_config(TINY_LIPSCHITZ))
        paths = write_results(record, tmp_path)
        record_path = tmp_path / "lipschitz_record.json"
        assert record_path in paths
        loaded = json.loads(record_path.read_text())
        assert loaded["status"] == "pass"
        assert loaded["schema_version"] == 1
        assert loaded["config"]["params"]["samples"] == 20_000
        csv_paths = [p for p in paths if p.suffix == ".csv"]
        assert csv_paths
        for path in csv_paths:
            data = path.read_bytes()
            assert b"\r" not in data  # unix newlines regardless of platform

    def test_series_files_are_byte_identical_across_runs(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        write_results(run_experiment(load_config(TINY_LIPSCHITZ)), out1)
        write_results(run_experiment(load_config(TINY_LIPSCHITZ)), out2)
        for p1 in sorted(out1.glob("*.csv")):
            p2 = out2 / p1.name
            assert p1.read_bytes() == p2.read_bytes()


class TestCli:
    def test_list_experiments(self, capsys):
        assert cli.main(["list-experiments"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 13
        assert "maxreg" in out

    def test_validate_good_config(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(TINY_LIPSCHITZ))
        assert cli.main(["validate", str(path)]) == 0
        assert "ok: lipschitz config is valid" in capsys.readouterr().out

    def test_validate_bad_config(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"experiment": "nope"}))
        assert cli.main(["validate", str(path)]) == 3
        assert "config error:" in capsys.readouterr().err

    def test_run_writes_outputs_and_exits_zero(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(TINY_LIPSCHITZ))
        out_dir = tmp_path / "results"
        assert cli.main(["run", str(path), "--out", str(out_dir)]) == 0
        assert (out_dir / "lipschitz_record.json").exists()
        stdout = capsys.readouterr().out
        assert "status: pass" in stdout
        assert "max_violation = " in stdout

    def test_run_missing_config_exits_three(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "none.json")]) == 3

    def test_bad_thread_override_exits_three(self, tmp_path, capsys):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(TINY_LIPSCHITZ))
        assert cli.main(["run", str(path), "--threads", "0"]) == 3
        assert "threads must be at least 1" in capsys.readouterr().err

    def test_usage_error_folds_to_three(self, capsys):
        assert cli.main([]) == 3
        assert cli.main(["frobnicate"]) == 3
