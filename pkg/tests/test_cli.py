import filecmp
import io
import json
import xml.etree.ElementTree as ET
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

import numpy as np
import pytest

from kerndep import cli
from kerndep.samples import save_samples_csv


def run_cli(*argv):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run_cli(*argv)
    assert code == 0, f"exit {code}: {err}"
    return json.loads(out)


@pytest.fixture(scope="module")
def csv_pair(tmp_path_factory):
    rng = np.random.default_rng(0)
    base = tmp_path_factory.mktemp("csv")
    x = rng.normal(size=(40, 2))
    y = x + 0.1 * rng.normal(size=(40, 2))
    save_samples_csv(base / "x.csv", x)
    save_samples_csv(base / "y.csv", y)
    return str(base / "x.csv"), str(base / "y.csv")


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("runs") / "data"
    code, _, err = run_cli("generate", str(out), "--sequences", "8",
                           "--frames-per-sequence", "8", "--side", "8",
                           "--classes", "4", "--seed", "3")
    assert code == 0, err
    return str(out)


@pytest.fixture(scope="module")
def config_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("config") / "config.json"
    path.write_text(json.dumps({
        "input_dim": 64, "hidden_dims": [16], "latent_dim": 4,
        "epochs": 2, "batch_size": 32, "hsic_subsample": 16, "seed": 2,
    }))
    return str(path)


@pytest.fixture(scope="module")
def train_dir(tmp_path_factory, data_dir, config_path):
    out = tmp_path_factory.mktemp("runs") / "train"
    code, _, err = run_cli("train", str(out), "--config", config_path,
                           "--data", data_dir)
    assert code == 0, err
    return str(out)


class TestHsic:
    def test_normalized_default(self, csv_pair):
        out = run_json("hsic", *csv_pair)
        assert out["estimator"] == "hsic_normalized"
        assert 0.0 <= out["value"] <= 1.0
        assert out["n"] == 40
        assert out["kernel_x"]["kind"] == "rbf"
        assert out["kernel_x"]["bandwidth"] > 0  # resolved median heuristic

    def test_unnormalized_and_kernel_flags(self, csv_pair):
        out = run_json("hsic", *csv_pair, "--no-normalized",
                       "--kernel-x", "linear", "--bandwidth-y", "2.0")
        assert out["estimator"] == "hsic_unnormalized"
        assert out["kernel_x"] == {"kind": "linear", "bandwidth": None}
        assert out["kernel_y"] == {"kind": "rbf", "bandwidth": 2.0}

    def test_degenerate_exits_3(self, tmp_path):
        const = tmp_path / "const.csv"
        save_samples_csv(const, np.ones((10, 2)))
        code, _, err = run_cli("hsic", str(const), str(const),
                               "--bandwidth-x", "1.0", "--bandwidth-y", "1.0")
        assert code == 3
        assert "error:" in err

    def test_missing_file_exits_2(self):
        code, _, err = run_cli("hsic", "/nonexistent/x.csv", "/nonexistent/y.csv")
        assert code == 2

    def test_malformed_csv_exits_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,oops\n2.0,3.0\n")
        code, _, err = run_cli("hsic", str(bad), str(bad))
        assert code == 2
        assert "line 1" in err


class TestSmi:
    def test_fixed_theta(self, csv_pair):
        out = run_json("smi", *csv_pair, "--fixed-theta")
        assert out["estimator"] == "smi_fixed_theta"
        assert -1.0 <= out["value"] <= 0.0
        assert out["lambda"] is None

    def test_fixed_lambda(self, csv_pair):
        out = run_json("smi", *csv_pair, "--lambda", "0.1")
        assert out["estimator"] == "smi"
        assert out["lambda"] == 0.1

    def test_cross_validated(self, csv_pair):
        out = run_json("smi", *csv_pair, "--folds", "3")
        assert out["lambda"] in [1e-3, 1e-2, 1e-1, 1.0]

    def test_explicit_cv_flag_matches_default(self, csv_pair):
        assert run_json("smi", *csv_pair, "--cv") == run_json("smi", *csv_pair)

    def test_cv_excludes_fixed_lambda(self, csv_pair):
        with pytest.raises(SystemExit) as exc:
            run_cli("smi", *csv_pair, "--cv", "--lambda", "0.1")
        assert exc.value.code == 2


class TestPermtest:
    def test_deterministic_output(self, csv_pair):
        a = run_json("permtest", *csv_pair, "--permutations", "99", "--seed", "5")
        b = run_json("permtest", *csv_pair, "--permutations", "99", "--seed", "5")
        assert a == b
        assert a["p_value"] <= 0.05  # strongly dependent pair
        assert a["num_permutations"] == 99

    def test_too_few_permutations_exit_2(self, csv_pair):
        code, _, _ = run_cli("permtest", *csv_pair, "--permutations", "10")
        assert code == 2


class TestGenerate:
    def test_writes_dataset_and_manifest(self, data_dir):
        base = json.loads((Path(data_dir) / "manifest.json").read_text())
        assert base["schema"] == "kerndep-manifest-v1"
        assert base["command"] == "generate"
        assert base["args"]["sequences"] == 8
        assert (Path(data_dir) / "dataset.json").exists()
        assert (Path(data_dir) / "frames.csv").exists()

    def test_refuses_existing_dir(self, data_dir):
        code, _, err = run_cli("generate", data_dir)
        assert code == 4
        assert "--force" in err

    def test_force_overwrites(self, tmp_path):
        out = tmp_path / "ds"
        assert run_cli("generate", str(out), "--sequences", "2",
                       "--frames-per-sequence", "4")[0] == 0
        code, _, _ = run_cli("generate", str(out), "--sequences", "2",
                             "--frames-per-sequence", "4", "--force")
        assert code == 0

    def test_existing_file_cannot_be_forced(self, tmp_path):
        out = tmp_path / "collision"
        out.write_text("occupied")
        code, _, err = run_cli("generate", str(out), "--force")
        assert code == 4
        assert "not a directory" in err


class TestTrain:
    def test_outputs_and_summary(self, train_dir, data_dir):
        run = Path(train_dir)
        assert (run / "model.bin").exists()
        assert (run / "trace.jsonl").exists()
        manifest = json.loads((run / "manifest.json").read_text())
        assert manifest["command"] == "train"
        assert manifest["args"]["data"] == data_dir
        assert manifest["args"]["config"]["epochs"] == 2

    def test_replay_from_manifest_is_byte_identical(self, train_dir, tmp_path):
        replay = tmp_path / "replay"
        code, _, err = run_cli("train", str(replay), "--config",
                               str(Path(train_dir) / "manifest.json"))
        assert code == 0, err
        assert filecmp.cmp(Path(train_dir) / "trace.jsonl",
                           replay / "trace.jsonl", shallow=False)
        assert filecmp.cmp(Path(train_dir) / "model.bin",
                           replay / "model.bin", shallow=False)

    def test_summary_fields(self, tmp_path, data_dir, config_path):
        out = run_json("train", str(tmp_path / "t"), "--config", config_path,
                       "--data", data_dir)
        assert set(out) >= {"first_train_loss", "final_train_loss",
                            "final_val_loss", "best_val_epoch", "fingerprint"}
        assert out["epochs"] == 2

    def test_foreign_manifest_rejected(self, data_dir, tmp_path):
        code, _, err = run_cli("train", str(tmp_path / "t"), "--config",
                               str(Path(data_dir) / "manifest.json"))
        assert code == 2
        assert "not from a train run" in err

    def test_bad_config_json_exits_2(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"input_dim": 64}))
        code, _, err = run_cli("train", str(tmp_path / "t"), "--config", str(config))
        assert code == 2


class TestProbe:
    def test_reports_accuracy_and_task(self, train_dir, data_dir):
        out = run_json("probe", str(Path(train_dir) / "model.bin"),
                       data_dir, "--epochs", "40")
        assert 0.0 <= out["accuracy"] <= 1.0
        assert out["num_classes"] == 4
        assert out["task"] == "reconstruct"
        assert out["shuffle_seed"] is None

    def test_shuffled_labels(self, train_dir, data_dir):
        out = run_json("probe", str(Path(train_dir) / "model.bin"),
                       data_dir, "--epochs", "40", "--shuffle-labels", "7")
        assert out["shuffle_seed"] == 7

    def test_single_class_data_exits_3(self, train_dir, tmp_path):
        code, _, err = run_cli("generate", str(tmp_path / "one"), "--classes", "1",
                               "--sequences", "4", "--frames-per-sequence", "4",
                               "--side", "8")
        assert code == 0, err
        code, _, err = run_cli("probe", str(Path(train_dir) / "model.bin"),
                               str(tmp_path / "one"))
        assert code == 3


class TestPlot:
    def test_renders_svg(self, train_dir, tmp_path):
        svg_path = tmp_path / "out.svg"
        out = run_json("plot", str(svg_path),
                       str(Path(train_dir) / "trace.jsonl"),
                       "--series", "hsic_xz")
        assert out["traces"] == 1
        root = ET.fromstring(svg_path.read_text())
        assert root.tag.endswith("svg")

    def test_loss_series(self, train_dir, tmp_path):
        svg_path = tmp_path / "loss.svg"
        run_json("plot", str(svg_path),
                 str(Path(train_dir) / "trace.jsonl"), "--series", "loss")
        assert svg_path.exists()

    def test_unknown_series_is_usage_error(self, train_dir, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli("plot", str(tmp_path / "x.svg"),
                    str(Path(train_dir) / "trace.jsonl"),
                    "--series", "entropy")
        assert exc.value.code == 2

    def test_degenerate_series_exits_2(self, tmp_path):
        from kerndep.trace import EpochRecord, TrainingTrace, export_jsonl
        trace = TrainingTrace("flat", [
            EpochRecord(1, 0.5, 0.5, None, None),
            EpochRecord(2, 0.4, 0.5, None, None),
        ])
        export_jsonl(trace, tmp_path / "trace.jsonl")
        code, _, err = run_cli("plot", str(tmp_path / "x.svg"),
                               str(tmp_path / "trace.jsonl"),
                               "--series", "hsic_xz")
        assert code == 2
        assert "no numeric values" in err


def test_version_mentions_backend():
    with pytest.raises(SystemExit) as exc:
        run_cli("--version")
    assert exc.value.code == 0
