"""Regression error metrics, per target and averaged across targets."""

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import AllExcluded, EmptyInput, LengthMismatch, ShapeMismatch

DEFAULT_ZERO_TOL = 1e-8


def _pair(y, yhat):
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise LengthMismatch(f"lengths differ: {y.size} vs {yhat.size}")
    if y.size == 0:
        raise EmptyInput("metrics need at least one sample")
    return y, yhat


def mae(y, yhat):
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def mape(y, yhat, zero_tol=DEFAULT_ZERO_TOL):
    """Mean absolute percentage error in percent.

    Rows with ``|y| <= zero_tol`` are excluded instead of regularising the
    denominator. Returns ``(value, n_excluded)``.
    """
    y, yhat = _pair(y, yhat)
    keep = np.abs(y) > zero_tol
    n_excluded = int(y.size - keep.sum())
    if not keep.any():
        raise AllExcluded(f"all {y.size} targets within {zero_tol} of zero")
    value = 100.0 * float(np.mean(np.abs((y[keep] - yhat[keep]) / y[keep])))
    return value, n_excluded


def rmse(y, yhat):
    y, yhat = _pair(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


@dataclass
class TargetMetrics:
    mae: float
    mape: float
    rmse: float
    n_mape_excluded: int = 0


@dataclass
class MetricsReport:
    targets: list
    avg_mae: float
    avg_mape: float
    avg_rmse: float
    n_samples: int
    target_names: list = field(default_factory=list)

    @property
    def n_mape_excluded(self):
        return sum(t.n_mape_excluded for t in self.targets)

    def to_dict(self):
        d = asdict(self)
        d["n_mape_excluded"] = self.n_mape_excluded
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d.pop("n_mape_excluded", None)
        d["targets"] = [TargetMetrics(**t) for t in d["targets"]]
        return cls(**d)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def table_row(self, label):
        """Row in table layout: per-target values then the average, per metric."""
        row = {"model": label}
        for name in ("mae", "mape", "rmse"):
            for t, tm in enumerate(self.targets, start=1):
                row[f"{name}_y{t}"] = getattr(tm, name)
            row[f"avg_{name}"] = getattr(self, f"avg_{name}")
        return row


def report(Y, Yhat, zero_tol=DEFAULT_ZERO_TOL, target_names=None):
    Y = np.asarray(Y, dtype=float)
    Yhat = np.asarray(Yhat, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Yhat.ndim == 1:
        Yhat = Yhat[:, None]
    if Y.shape != Yhat.shape:
        raise ShapeMismatch(f"Y {Y.shape} vs Yhat {Yhat.shape}")
    per = []
    for t in range(Y.shape[1]):
        p, excl = mape(Y[:, t], Yhat[:, t], zero_tol)
        per.append(TargetMetrics(mae(Y[:, t], Yhat[:, t]), p,
                                 rmse(Y[:, t], Yhat[:, t]), excl))
    return MetricsReport(
        targets=per,
        avg_mae=float(np.mean([m.mae for m in per])),
        avg_mape=float(np.mean([m.mape for m in per])),
        avg_rmse=float(np.mean([m.rmse for m in per])),
        n_samples=int(Y.shape[0]),
        target_names=list(target_names) if target_names is not None else [],
    )


def table_csv(rows):
    """Render labelled reports ``[(label, MetricsReport), ...]`` as CSV text."""
    dict_rows = [r.table_row(label) for label, r in rows]
    columns = ["model"]
    for name in ("mae", "mape", "rmse"):
        n_targets = max(len(r.targets) for _, r in rows)
        columns += [f"{name}_y{t}" for t in range(1, n_targets + 1)] + [f"avg_{name}"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in dict_rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()
