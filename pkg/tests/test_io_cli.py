import json
import os

import numpy as np
import pytest

from divi.bench import ExperimentConfig, run_benchmark, run_sweep, scaling_table
from divi.cli import main
from divi.datagen import gen_matched, standardize
from divi.io import SnapshotError, load_model, read_dataset, save_model, write_dataset
from divi.model import PriorMode
from divi.prior import build_prior
from divi.trainer import TrainConfig, fit, hard_assignments


@pytest.fixture
def fitted(tmp_path):
    raw = gen_matched(120, 15, seed=2)
    data = standardize(raw)
    prior = build_prior(data, PriorMode.INFORMATIVE, seed=2)
    result = fit(data, prior, TrainConfig(seed=2, epochs=60, t_split=30))
    return raw, data, result


class TestDatasetCSV:
    def test_round_trip_bitwise(self, tmp_path):
        data = gen_matched(40, 12, seed=1)
        path = str(tmp_path / "d.csv")
        write_dataset(data, path)
        back = read_dataset(path)
        np.testing.assert_array_equal(back.x, data.x)
        np.testing.assert_array_equal(back.labels, data.labels)
        np.testing.assert_array_equal(back.informative_mask, data.informative_mask)

    def test_no_labels(self, tmp_path):
        from divi.datagen import Dataset
        data = Dataset(x=np.random.default_rng(0).normal(0, 1, (5, 3)))
        path = str(tmp_path / "x.csv")
        write_dataset(data, path)
        back = read_dataset(path)
        assert back.labels is None
        np.testing.assert_array_equal(back.x, data.x)


class TestModelSnapshot:
    def test_round_trip_bitwise(self, fitted, tmp_path):
        _, _, result = fitted
        path = str(tmp_path / "m.json")
        save_model(result, path)
        back = load_model(path)
        np.testing.assert_array_equal(back.params.mu, result.params.mu)
        np.testing.assert_array_equal(back.params.alpha, result.params.alpha)
        np.testing.assert_array_equal(back.params.logvar, result.params.logvar)
        np.testing.assert_array_equal(back.params.eta, result.params.eta)
        np.testing.assert_array_equal(back.gate_probs, result.gate_probs)
        assert back.final_k == result.final_k
        assert back.config == result.config
        np.testing.assert_array_equal(back.standardization[0],
                                      result.standardization[0])

    def test_predict_on_load(self, fitted, tmp_path):
        _, data, result = fitted
        path = str(tmp_path / "m.json")
        save_model(result, path)
        back = load_model(path)
        np.testing.assert_array_equal(hard_assignments(data.x, back.params),
                                      result.labels)

    def test_unknown_schema_version(self, fitted, tmp_path):
        _, _, result = fitted
        path = str(tmp_path / "m.json")
        save_model(result, path)
        doc = json.load(open(path))
        doc["schema_version"] = "divi-model-v999"
        json.dump(doc, open(path, "w"))
        with pytest.raises(SnapshotError, match="schema"):
            load_model(path)

    def test_corrupt_file(self, tmp_path):
        path = str(tmp_path / "bad.json")
        with open(path, "w") as fh:
            fh.write("{not json")
        with pytest.raises(SnapshotError):
            load_model(path)


class TestBenchmarkRunner:
    def test_single_seed_single_method_bookkeeping(self):
        cfg = ExperimentConfig(scenario="matched", n=90, d=12, seeds=[0],
                               methods=["kmeans"])
        rows, summary = run_benchmark(cfg)
        assert len(rows) == 1
        assert len(summary) == 1
        assert rows[0].error == ""
        assert summary[0][4] == 1  # runs column

    def test_summary_matches_member_rows(self):
        cfg = ExperimentConfig(scenario="matched", n=90, d=12, seeds=[0, 1, 2],
                               methods=["kmeans"])
        rows, summary = run_benchmark(cfg)
        aris = [r.ari for r in rows]
        assert summary[0][5] == pytest.approx(np.mean(aris), abs=1e-12)
        assert summary[0][6] == pytest.approx(np.std(aris, ddof=1), abs=1e-12)

    def test_deterministic_tables_modulo_wall_time(self):
        cfg = ExperimentConfig(scenario="matched", n=80, d=12, seeds=[0, 1],
                               methods=["kmeans", "divi-info"],
                               train={"epochs": 40, "t_split": 20})
        rows_a, _ = run_benchmark(cfg)
        rows_b, _ = run_benchmark(cfg)
        for a, b in zip(rows_a, rows_b):
            ca, cb = a.as_csv(), b.as_csv()
            ca[RESULT_WALL_IDX] = cb[RESULT_WALL_IDX] = None
            assert ca == cb

    def test_error_rows_keep_batch_going(self, tmp_path):
        from divi.datagen import Dataset
        from divi.io import write_dataset
        tiny = Dataset(x=np.random.default_rng(0).normal(0, 1, (2, 4)),
                       labels=np.array([0, 1]))
        path = str(tmp_path / "tiny.csv")
        write_dataset(tiny, path)
        cfg = ExperimentConfig(scenario="csv", data_csv=path, seeds=[0],
                               methods=["kmeans", "gmm"], oracle_k=3)
        rows, _ = run_benchmark(cfg)
        assert any(r.error for r in rows)

    def test_invalid_overrides_rejected_before_running(self):
        cfg = ExperimentConfig(scenario="matched", n=50, d=12, seeds=[0],
                               methods=["kmeans"], train={"epochs": 0})
        with pytest.raises(ValueError):
            run_benchmark(cfg)

    def test_output_files(self, tmp_path):
        cfg = ExperimentConfig(scenario="matched", n=60, d=12, seeds=[0],
                               methods=["kmeans"], out=str(tmp_path / "o"))
        run_benchmark(cfg)
        names = sorted(os.listdir(tmp_path / "o"))
        assert names == ["bench_manifest.json", "bench_results.csv",
                         "bench_summary.csv"]
        manifest = json.load(open(tmp_path / "o" / "bench_manifest.json"))
        assert {"config", "config_sha256", "version", "backend"} <= set(manifest)


RESULT_WALL_IDX = 11  # wall_time_seconds column index in ResultRow.as_csv()


class TestSweepRunner:
    def test_fixed_datasets_reused(self):
        cfg = ExperimentConfig(scenario="matched", n=80, d=12, seeds=[0, 1],
                               methods=["divi-info"],
                               train={"epochs": 40, "t_split": 20},
                               sweep_axis="tau_mult", sweep_values=[1.0, 1.0001])
        rows, summary = run_sweep(cfg)
        # identical tau values on identical datasets give identical metrics
        first = [r for v, r in rows if v == 1.0]
        second = [r for v, r in rows if v == 1.0001]
        for a, b in zip(first, second):
            assert a.ari == b.ari
            assert a.final_k == b.final_k

    def test_axis_validation(self):
        cfg = ExperimentConfig(sweep_axis="bogus", sweep_values=[1])
        with pytest.raises(ValueError):
            cfg.validate()


class TestScaling:
    def test_rows_shape(self):
        rows = scaling_table([(100, 20), (100, 40)], k=2, epochs=2)
        assert len(rows) == 2
        assert all(row[5] > 0 for row in rows)


class TestCLI:
    def test_gen_fit_eval_round_trip(self, tmp_path):
        csv_path = str(tmp_path / "data.csv")
        model_path = str(tmp_path / "model.json")
        assert main(["gen", "--scenario", "matched", "--n", "80", "--d", "12",
                     "--seed", "1", "--out", csv_path]) == 0
        assert main(["fit", "--data", csv_path, "--mode", "info", "--seed", "1",
                     "--epochs", "40", "--t-split", "20", "--out", model_path]) == 0
        assert main(["eval", "--model", model_path, "--data", csv_path,
                     "--out", str(tmp_path / "metrics.csv")]) == 0
        assert os.path.exists(tmp_path / "metrics.csv")

    def test_baseline_command(self, tmp_path):
        csv_path = str(tmp_path / "data.csv")
        main(["gen", "--n", "60", "--d", "12", "--seed", "0", "--out", csv_path])
        assert main(["baseline", "--data", csv_path, "--method", "gmm",
                     "--k", "3", "--seed", "0"]) == 0

    def test_bench_with_config_file(self, tmp_path):
        cfg_path = str(tmp_path / "cfg.json")
        json.dump({"scenario": "matched", "n": 60, "d": 12, "seeds": [0],
                   "methods": ["kmeans"]}, open(cfg_path, "w"))
        assert main(["bench", "--config", cfg_path,
                     "--out", str(tmp_path / "out")]) == 0

    def test_bench_failure_exit_code(self, tmp_path):
        from divi.datagen import Dataset
        tiny = Dataset(x=np.random.default_rng(0).normal(0, 1, (2, 4)),
                       labels=np.array([0, 1]))
        path = str(tmp_path / "tiny.csv")
        write_dataset(tiny, path)
        assert main(["bench", "--data", path, "--seeds", "0",
                     "--methods", "kmeans"]) == 1

    def test_sweep_command(self, tmp_path):
        assert main(["sweep", "--axis", "beta_mult", "--values", "0.5,1.0",
                     "--n", "60", "--d", "12", "--seeds", "0:2",
                     "--epochs", "30", "--t-split", "15",
                     "--out", str(tmp_path / "sw")]) == 0
        assert os.path.exists(tmp_path / "sw" / "sweep_summary.csv")

    def test_scaling_command(self, tmp_path):
        out = str(tmp_path / "scale.csv")
        assert main(["scaling", "--sizes", "100x20;100x40", "--epochs", "2",
                     "--out", out]) == 0
        assert os.path.exists(out)
