import csv
import hashlib
import json
import os

import numpy as np
import pytest

from laurent_mtr import experiment
from laurent_mtr.cli import main
from laurent_mtr.dataset import Dataset, load_csv, write_csv
from laurent_mtr.errors import MissingArtifact
from laurent_mtr.symbolic import SymbolicEquation, Term, load_equations
from laurent_mtr.synthetic import recovery_dataset

FAST = {"epochs": 300, "grow_interval": 100, "k_init": 1, "k_max": 3, "checkpoint_every": 100}


def _config(tmp_path, name="cfg.json", data=None, **overrides):
    csv_path = tmp_path / "data.csv"
    if not csv_path.exists():
        write_csv(data or recovery_dataset(120, seed=3), csv_path)
    cfg = {"dataset_path": "data.csv", "target_columns": ["y1", "y2"], **FAST, **overrides}
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture(scope="module")
def run(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = _config(root)
    out = str(root / "run")
    assert main(["train", "--config", cfg, "--out", out]) == 0
    return root, cfg, out


def _read_rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_train_writes_run_directory(run):
    root, _, out = run
    assert sorted(os.listdir(out)) == ["checkpoints", "config.json", "equations.json",
                                       "manifest.json", "metrics.csv", "report.json"]
    assert sorted(os.listdir(os.path.join(out, "checkpoints"))) == [
        "epoch_100.json", "epoch_200.json", "epoch_300.json"]
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    digest = hashlib.sha256(open(root / "data.csv", "rb").read()).hexdigest()
    assert manifest["dataset"]["sha256"] == digest
    assert manifest["config"]["k_max"] == 3 and manifest["config"]["lambda_sym"] == 0.01
    assert manifest["transform"]["shifts"] == [0.0, 0.0]
    _, meta = load_equations(os.path.join(out, "equations.json"))
    assert meta["dataset_sha256"] == digest and meta["precision"] == 0.01 and meta["seed"] == 42
    rows = _read_rows(os.path.join(out, "metrics.csv"))
    assert rows[0] == ["epoch", "task_loss", "sym_loss", "l1", "l2", "total", "val_loss", "K"]
    assert len(rows) == 301


def test_capacity_bound(run):
    _, _, out = run
    eqs, _ = load_equations(os.path.join(out, "equations.json"))
    assert all(e.n_terms <= 3 for e in eqs)


def test_refuses_existing_run_without_force(run, capsys):
    _, cfg, out = run
    assert main(["train", "--config", cfg, "--out", out]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "FileExistsError"


def test_force_and_seed_override(tmp_path):
    cfg = _config(tmp_path)
    out = str(tmp_path / "r")
    assert main(["train", "--config", cfg, "--out", out, "--seed", "7"]) == 0
    assert main(["--force", "--seed", "7", "train", "--config", cfg, "--out", out]) == 0
    assert json.load(open(os.path.join(out, "config.json")))["seed"] == 7


@pytest.mark.parametrize("overrides,key", [
    ({"k_max": "eight"}, "k_max"),
    ({"learning_rate": -1.0}, "learning_rate"),
    ({"unknown_option": 1}, "unknown_option"),
    ({"positivity": "abs"}, "positivity"),
    ({"target_columns": "y1"}, "target_columns"),
])
def test_malformed_config_exit_code(tmp_path, capsys, overrides, key):
    cfg = _config(tmp_path, **overrides)
    assert main(["train", "--config", cfg, "--out", str(tmp_path / "r")]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["key"] == key


def test_unparseable_and_incomplete_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["train", "--config", str(bad), "--out", str(tmp_path / "r")]) == 2
    bad.write_text(json.dumps({"target_columns": ["y1"]}))
    assert main(["train", "--config", str(bad), "--out", str(tmp_path / "r")]) == 2
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["key"] == "dataset_path"
    assert main(["train", "--out", str(tmp_path / "r")]) == 2


def test_missing_dataset_is_runtime_error(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"dataset_path": "nope.csv", "target_columns": ["y"]}))
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "r")]) == 1


def test_eval_reports(run, capsys):
    _, _, out = run
    assert main(["eval", out]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["model"] for r in rows] == ["network", "equation"]
    assert all(float(r["avg_mae"]) >= 0 for r in rows)


def test_eval_on_train_split_matches_logged_loss(run):
    _, _, out = run
    net, _ = experiment.run_eval(out, which="train")
    logged = json.load(open(os.path.join(out, "report.json")))["train"]["final_train_task_loss"]
    assert np.mean([t.rmse ** 2 for t in net.targets]) == pytest.approx(logged, rel=0, abs=1e-9)


def test_eval_external_csv_uses_stored_transform(tmp_path):
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 2, size=(80, 2))
    data = Dataset(X, np.column_stack([X.sum(axis=1), X[:, 0]]), ["x1", "x2"], ["y1", "y2"])
    cfg = _config(tmp_path, data=data, epochs=50, k_max=1)
    out = str(tmp_path / "r")
    assert main(["train", "--config", cfg, "--out", out]) == 0
    shifts = json.load(open(os.path.join(out, "manifest.json")))["transform"]["shifts"]
    assert min(shifts) > 0
    net_test, eq_test = experiment.run_eval(out)
    net_all, _ = experiment.run_eval(out, str(tmp_path / "data.csv"))
    assert net_all.n_samples == 80 and net_test.n_samples == 16


def test_eval_missing_artifacts(tmp_path, capsys):
    with pytest.raises(MissingArtifact):
        experiment.run_eval(str(tmp_path))
    assert main(["eval", str(tmp_path)]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "MissingArtifact"


def test_extract_formats(run, capsys):
    _, _, out = run
    assert main(["extract", out, "--laurent"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [l.split(" = ")[0] for l in lines] == ["y1", "y2"]
    assert "." not in "".join(l.split("^")[1].split("·")[0] for l in lines if "^" in l)
    assert main(["extract", out, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["equations"]) == 2
    assert main(["extract", out, "--format", "latex"]) == 0
    assert "\\mathrm{y1}" in capsys.readouterr().out


def test_sweep_input_shape_and_round_trip(run, capsys):
    root, _, out = run
    target = str(root / "sweep.csv")
    assert main(["sweep-input", out, "--grid-size", "2", "--out", target]) == 0
    rows = _read_rows(target)
    assert rows[0] == ["feature", "x_original_units", "y"] and len(rows) == 1 + 2 * 2
    back = load_csv(target, ["y"])
    assert back.n == 4
    assert main(["sweep-input", out, "--grid-size", "2", "--out", target]) == 1
    assert main(["sweep-input", out, "--target", "3", "--out", str(root / "s3.csv")]) == 2


def test_sweep_input_bias_only_and_monotone(run, tmp_path):
    _, _, out = run
    bias_only = [SymbolicEquation(1.25, [], ["x1", "x2"], "y1")]
    rows = experiment.sweep_input(out, 0, 10, equations=bias_only)
    assert {r[2] for r in rows} == {1.25}
    truth = [SymbolicEquation(3.0, [Term(2.0, [2.0, -1.0])], ["x1", "x2"], "y1")]
    ys = [r[2] for r in experiment.sweep_input(out, 0, 100, equations=truth) if r[0] == 1]
    assert all(b > a for a, b in zip(ys, ys[1:]))


def test_sweep_input_reports_original_units(tmp_path):
    rng = np.random.default_rng(1)
    X = rng.uniform(-3, -1, size=(60, 1))
    data = Dataset(X, np.column_stack([X[:, 0], -X[:, 0]]), ["x1"], ["y1", "y2"])
    cfg = _config(tmp_path, data=data, epochs=20, k_max=1)
    out = str(tmp_path / "r")
    assert main(["train", "--config", cfg, "--out", out]) == 0
    rows = experiment.sweep_input(out, 0, 5)
    train_x = experiment.run_dataset(out, which="train").to_original_units(
        experiment.run_dataset(out, which="train").features)
    assert rows[0][1] == pytest.approx(train_x.min(), abs=1e-12)
    assert rows[-1][1] == pytest.approx(train_x.max(), abs=1e-12)


def test_sweep_pabs(tmp_path, caplog):
    cfg = _config(tmp_path, epochs=150, grow_interval=50)
    out = str(tmp_path / "sw")
    assert main(["sweep-pabs", "--config", cfg, "--out", out,
                 "--k-init", "1,1,3", "--k-max", "2"]) == 0
    assert "duplicate" in caplog.text and "skipping" in caplog.text
    rows = _read_rows(os.path.join(out, "summary.csv"))
    assert len(rows) == 2 and rows[1][:2] == ["1", "2"]
    load_csv(os.path.join(out, "summary.csv"), ["avg_mae"])


def test_sweep_pabs_parallel_matches_serial(tmp_path):
    cfg = experiment.load_config(_config(tmp_path, epochs=120, grow_interval=50))
    serial = experiment.sweep_pabs(cfg, str(tmp_path / "a"), [2, 3], [1], jobs=1)
    parallel = experiment.sweep_pabs(cfg, str(tmp_path / "b"), [2, 3], [1], jobs=2)
    assert serial == parallel


def test_ablate(tmp_path, capsys):
    cfg = _config(tmp_path, epochs=150, grow_interval=50)
    out = str(tmp_path / "ab")
    assert main(["ablate", "--config", cfg, "--out", out]) == 0
    rows = list(csv.DictReader(open(os.path.join(out, "ablation.csv"))))
    assert [r["model"] for r in rows] == ["network", "network_without_sl", "equation",
                                          "equation_without_sl"]
    doc = json.load(open(os.path.join(out, "ablation.json")))
    assert doc["growth_events"]["with_sl"] == doc["growth_events"]["without_sl"]
    load_csv(os.path.join(out, "ablation.csv"), ["avg_mae"], ["mae_y1", "mae_y2"])
    assert main(["ablate", "--config", cfg, "--out", out]) == 1


def test_metrics_csv_round_trips(run):
    _, _, out = run
    ds = load_csv(os.path.join(out, "metrics.csv"), ["total"])
    text = _read_rows(os.path.join(out, "metrics.csv"))
    assert float(text[1][5]) == ds.targets[0, 0]


def test_identical_runs_are_byte_identical(tmp_path):
    cfg = _config(tmp_path)
    for name in ("a", "b"):
        assert main(["train", "--config", cfg, "--out", str(tmp_path / name)]) == 0
    for name in ("metrics.csv", "equations.json", "report.json", "config.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
