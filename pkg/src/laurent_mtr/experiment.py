"""Config-driven runs: train, evaluate, sweeps and the symbolic-loss ablation.

A run directory holds::

    manifest.json  config.json  metrics.csv  equations.json  report.json
    checkpoints/epoch_N.json
"""

import csv
import hashlib
import json
import logging
import os
import shutil
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from itertools import product

import numpy as np

from . import metrics
from .baseline import fit_linear, predict_linear
from .config import TrainConfig
from .dataset import ensure_positive, load_csv, minmax_positive, split
from .errors import ConfigError, MissingArtifact
from .model import Model, forward_batch
from .symbolic import evaluate_equation, extract_equations, load_equations, save_equations
from .training import METRIC_COLUMNS, train

log = logging.getLogger(__name__)

RUN_FILES = ("manifest.json", "config.json", "metrics.csv", "equations.json", "report.json")


@dataclass(frozen=True)
class RunConfig:
    dataset_path: str
    target_columns: list
    feature_columns: list = None
    train_fraction: float = 0.8
    split_seed: int = 42
    epsilon_pos: float = 1e-6
    positivity: str = "shift"
    train: TrainConfig = field(default_factory=TrainConfig)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "train"}
        d.update(self.train.to_dict())
        return d

    @classmethod
    def from_dict(cls, d, base_dir="."):
        if not isinstance(d, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        own = {f.name for f in fields(cls)} - {"train"}
        train_keys = {f.name for f in fields(TrainConfig)}
        for key in d:
            if key not in own and key not in train_keys:
                raise ConfigError(key, "unknown config key")
        for key in ("dataset_path", "target_columns"):
            if key not in d:
                raise ConfigError(key, "required key missing")
        if not isinstance(d["dataset_path"], str):
            raise ConfigError("dataset_path", "expected a string")
        for key in ("target_columns", "feature_columns"):
            value = d.get(key)
            if value is not None and (not isinstance(value, list) or not value
                                      or not all(isinstance(v, str) for v in value)):
                raise ConfigError(key, "expected a non-empty list of column names")
        if d.get("positivity", "shift") not in ("shift", "minmax"):
            raise ConfigError("positivity", "expected 'shift' or 'minmax'")
        frac = d.get("train_fraction", 0.8)
        if isinstance(frac, bool) or not isinstance(frac, (int, float)) or not 0 < frac < 1:
            raise ConfigError("train_fraction", "expected a number in (0, 1)")
        eps = d.get("epsilon_pos", 1e-6)
        if isinstance(eps, bool) or not isinstance(eps, (int, float)) or eps <= 0:
            raise ConfigError("epsilon_pos", "expected a positive number")
        seed = d.get("split_seed", 42)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError("split_seed", "expected an integer")

        path = d["dataset_path"]
        if not os.path.isabs(path):
            path = os.path.normpath(os.path.join(base_dir, path))
        kwargs = {k: d[k] for k in own if k in d}
        kwargs["dataset_path"] = path
        kwargs["train_fraction"] = float(frac)
        kwargs["epsilon_pos"] = float(eps)
        train_cfg = TrainConfig.from_dict({k: v for k, v in d.items() if k in train_keys})
        return cls(train=train_cfg, **kwargs)

    def with_train(self, **changes):
        return replace(self, train=replace(self.train, **changes))


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"malformed JSON: {exc}") from None
    return RunConfig.from_dict(raw, base_dir=os.path.dirname(os.path.abspath(path)))


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def prepare(cfg):
    """Load, make positive, split. Returns ``(transformed dataset, split)``."""
    raw = load_csv(cfg.dataset_path, cfg.target_columns, cfg.feature_columns)
    data = ensure_positive(raw, cfg.epsilon_pos)
    if cfg.positivity == "minmax":
        data = minmax_positive(data, cfg.epsilon_pos)
    return data, split(data, cfg.train_fraction, cfg.split_seed)


def _prepare_dir(run_dir, force):
    if os.path.exists(run_dir) and os.listdir(run_dir):
        if not force:
            raise FileExistsError(f"{run_dir} already exists; pass --force to overwrite")
        for name in RUN_FILES:
            if os.path.exists(os.path.join(run_dir, name)):
                os.remove(os.path.join(run_dir, name))
        shutil.rmtree(os.path.join(run_dir, "checkpoints"), ignore_errors=True)
    os.makedirs(os.path.join(run_dir, "checkpoints"), exist_ok=True)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def write_metrics_csv(history, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for h in history:
            w.writerow([repr(v) if isinstance(v, float) else v for v in h.row()])


def extract(cfg, model, names, precision=None):
    t = cfg.train
    return extract_equations(model, t.precision if precision is None else precision,
                             t.prune_threshold, names.feature_names, names.target_names,
                             relative=t.prune_relative)


def evaluate_model(model, eqs, ds):
    net = metrics.report(ds.targets, forward_batch(model, ds.features),
                         target_names=ds.target_names)
    eq = metrics.report(ds.targets, evaluate_equation(eqs, ds.features),
                        target_names=ds.target_names)
    return net, eq


def run_train(cfg, run_dir, force=False):
    """Train from a resolved config and persist every artifact into ``run_dir``."""
    _prepare_dir(run_dir, force)
    started = time.time()
    data, sd = prepare(cfg)
    report = train(sd, cfg.train)
    eqs = extract(cfg, report.model, data)
    digest = file_sha256(cfg.dataset_path)

    write_metrics_csv(report.history, os.path.join(run_dir, "metrics.csv"))
    ckpt_paths = []
    for epoch, state in sorted(report.checkpoints.items()):
        p = os.path.join("checkpoints", f"epoch_{epoch}.json")
        _write_json(os.path.join(run_dir, p), state)
        ckpt_paths.append(p)
    save_equations(eqs, os.path.join(run_dir, "equations.json"),
                   precision=cfg.train.precision, prune_threshold=cfg.train.prune_threshold,
                   prune_relative=cfg.train.prune_relative, dataset_sha256=digest,
                   seed=cfg.train.seed)
    _write_json(os.path.join(run_dir, "config.json"), cfg.to_dict())

    net, eq = evaluate_model(report.model, eqs, sd.test)
    lin = fit_linear(sd.train.features, sd.train.targets)
    lin_rep = metrics.report(sd.test.targets, predict_linear(lin, sd.test.features),
                             target_names=sd.test.target_names)
    _write_json(os.path.join(run_dir, "report.json"), {
        "train": report.summary(),
        "test": {"network": net.to_dict(), "equation": eq.to_dict(),
                 "linear": lin_rep.to_dict()},
    })
    _write_json(os.path.join(run_dir, "manifest.json"), {
        "config": cfg.to_dict(),
        "dataset": {"path": cfg.dataset_path, "sha256": digest, "n_rows": data.n},
        "transform": {
            "positivity": cfg.positivity,
            "epsilon_pos": cfg.epsilon_pos,
            "shifts": data.shifts.tolist(),
            "scales": data.scales.tolist(),
            "feature_names": data.feature_names,
            "target_names": data.target_names,
        },
        "split": {"train_fraction": cfg.train_fraction, "seed": cfg.split_seed,
                  "n_train": sd.train.n, "n_test": sd.test.n},
        "started": started,
        "finished": time.time(),
        "artifacts": {
            "metrics": "metrics.csv",
            "equations": "equations.json",
            "report": "report.json",
            "config": "config.json",
            "checkpoints": ckpt_paths,
            "final_checkpoint": ckpt_paths[-1],
        },
    })
    log.info("run written to %s", run_dir)
    return report


def load_run(run_dir):
    """Manifest, resolved config, final model and equations of a finished run."""
    path = os.path.join(run_dir, "manifest.json")
    if not os.path.exists(path):
        raise MissingArtifact(f"no manifest in {run_dir}")
    with open(path) as fh:
        manifest = json.load(fh)
    arts = manifest["artifacts"]
    for rel in (arts["final_checkpoint"], arts["equations"]):
        if not os.path.exists(os.path.join(run_dir, rel)):
            raise MissingArtifact(f"{rel} missing from {run_dir}")
    cfg = RunConfig.from_dict(manifest["config"])
    model = Model.load(os.path.join(run_dir, arts["final_checkpoint"]))
    eqs, _ = load_equations(os.path.join(run_dir, arts["equations"]))
    return manifest, cfg, model, eqs


def apply_transform(raw, manifest):
    t = manifest["transform"]
    shifts, scales = np.asarray(t["shifts"]), np.asarray(t["scales"])
    return replace(raw, features=raw.features * scales + shifts, shifts=shifts, scales=scales)


def run_dataset(run_dir, dataset_path=None, which="test"):
    """The rows a run is evaluated on, in the model's (transformed) units."""
    manifest, cfg, _, _ = load_run(run_dir)
    if dataset_path is not None:
        raw = load_csv(dataset_path, cfg.target_columns,
                       cfg.feature_columns or manifest["transform"]["feature_names"])
        return apply_transform(raw, manifest)
    _, sd = prepare(cfg)
    return {"train": sd.train, "test": sd.test}[which]


def run_eval(run_dir, dataset_path=None, which="test"):
    """Network and equation reports for a finished run."""
    _, _, model, eqs = load_run(run_dir)
    return evaluate_model(model, eqs, run_dataset(run_dir, dataset_path, which))


def run_extract(run_dir, precision=None):
    _, cfg, model, _ = load_run(run_dir)
    names = run_dataset(run_dir, which="train")
    return extract(cfg, model, names, precision if precision else cfg.train.precision)


def sweep_input(run_dir, target_index=0, grid_size=100, equations=None):
    """Vary one feature at a time over its training range, others at the median.

    Returns rows ``(feature_number, x_in_original_units, y)`` with 1-based
    feature numbers.
    """
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    _, _, _, eqs = load_run(run_dir)
    eqs = equations or eqs
    train_ds = run_dataset(run_dir, which="train")
    eq = eqs[target_index]
    X = train_ds.features
    lo, hi, med = X.min(axis=0), X.max(axis=0), np.median(X, axis=0)
    rows = []
    for j in range(X.shape[1]):
        grid = np.linspace(lo[j], hi[j], grid_size)
        probe = np.tile(med, (grid_size, 1))
        probe[:, j] = grid
        y = evaluate_equation(eq, probe)
        x_orig = train_ds.to_original_units(probe)[:, j]
        rows.extend((j + 1, float(a), float(b)) for a, b in zip(x_orig, y))
    return rows


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def _sweep_job(args):
    cfg, run_dir, force = args
    run_train(cfg, run_dir, force)
    net, eq = run_eval(run_dir)
    return net, eq


SWEEP_COLUMNS = ("k_init", "k_max", "avg_mae", "avg_mape", "avg_rmse",
                 "eq_avg_mae", "eq_avg_mape", "eq_avg_rmse")


def sweep_pabs(cfg, out_root, k_max_list, k_init_list, jobs=1, force=False):
    """Train and evaluate every ``(k_init, k_max)`` pair; returns summary rows."""
    if not k_max_list or not k_init_list:
        raise ValueError("k_max and k_init lists must be non-empty")
    pairs = []
    for pair in product(k_init_list, k_max_list):
        if pair in pairs:
            log.warning("duplicate pair k_init=%d k_max=%d ignored", *pair)
        elif pair[0] > pair[1]:
            log.warning("skipping k_init=%d > k_max=%d", *pair)
        else:
            pairs.append(pair)
    os.makedirs(out_root, exist_ok=True)
    tasks = [(cfg.with_train(k_init=a, k_max=b),
              os.path.join(out_root, f"kinit{a}_kmax{b}"), force) for a, b in pairs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_job, tasks))
    else:
        results = [_sweep_job(t) for t in tasks]
    rows = [(a, b, net.avg_mae, net.avg_mape, net.avg_rmse, eq.avg_mae, eq.avg_mape, eq.avg_rmse)
            for (a, b), (net, eq) in zip(pairs, results)]
    write_rows(os.path.join(out_root, "summary.csv"), SWEEP_COLUMNS, rows)
    return rows


ABLATION_LABELS = ("network", "network_without_sl", "equation", "equation_without_sl")


def ablate(cfg, out_root, force=False):
    """Identical runs with and without the symbolic loss; returns labelled reports."""
    os.makedirs(out_root, exist_ok=True)
    reports = {}
    for flag, tag in ((True, "with_sl"), (False, "without_sl")):
        run_dir = os.path.join(out_root, tag)
        rep = run_train(cfg.with_train(enable_symbolic_loss=flag), run_dir, force)
        reports[tag] = (rep, *run_eval(run_dir))
    labelled = [
        ("network", reports["with_sl"][1]),
        ("network_without_sl", reports["without_sl"][1]),
        ("equation", reports["with_sl"][2]),
        ("equation_without_sl", reports["without_sl"][2]),
    ]
    with open(os.path.join(out_root, "ablation.csv"), "w") as fh:
        fh.write(metrics.table_csv(labelled))
    _write_json(os.path.join(out_root, "ablation.json"), {
        "growth_events": {tag: [list(e) for e in r[0].growth_events]
                          for tag, r in reports.items()},
        "reports": {label: r.to_dict() for label, r in labelled},
    })
    return labelled, {tag: r[0] for tag, r in reports.items()}
