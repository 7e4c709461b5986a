"""Tabular multi-target data: CSV ingestion, positivity transform, splitting."""

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptyFile, MissingColumn, ParseError, TooFewRows

DEFAULT_EPSILON_POS = 1e-6


@dataclass(frozen=True)
class Dataset:
    """Feature matrix ``(N, d)`` and target matrix ``(N, M)`` with column names.

    ``shifts`` and ``scales`` record the affine map applied by the positivity
    transforms, so that ``transformed = original * scales + shifts``.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: list
    target_names: list
    shifts: np.ndarray = None
    scales: np.ndarray = None

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.features, dtype=float))
        Y = np.asarray(self.targets, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.shape[0] != Y.shape[0]:
            raise ValueError(f"features have {X.shape[0]} rows, targets {Y.shape[0]}")
        if X.shape[0] < 1 or X.shape[1] < 1 or Y.shape[1] < 1:
            raise ValueError(f"degenerate dataset shapes {X.shape}, {Y.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("dataset contains non-finite entries")
        if len(self.feature_names) != X.shape[1] or len(self.target_names) != Y.shape[1]:
            raise ValueError("column names do not match matrix widths")
        d = X.shape[1]
        shifts = np.zeros(d) if self.shifts is None else np.asarray(self.shifts, dtype=float)
        scales = np.ones(d) if self.scales is None else np.asarray(self.scales, dtype=float)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", Y)
        object.__setattr__(self, "feature_names", list(self.feature_names))
        object.__setattr__(self, "target_names", list(self.target_names))
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "scales", scales)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def m(self):
        return self.targets.shape[1]

    def to_original_units(self, X):
        """Undo the recorded positivity transform on a feature matrix."""
        return (np.asarray(X, dtype=float) - self.shifts) / self.scales

    def take(self, rows):
        return replace(self, features=self.features[rows], targets=self.targets[rows])


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    test: Dataset
    split_seed: int
    train_fraction: float
    train_rows: np.ndarray = field(default=None, repr=False)
    test_rows: np.ndarray = field(default=None, repr=False)


def _parse(value, row, col):
    try:
        x = float(value)
    except ValueError:
        raise ParseError(row, col, value) from None
    if not math.isfinite(x):
        raise ParseError(row, col, value)
    return x


def load_csv(path, target_columns, feature_columns=None):
    """Read a headered numeric CSV; ``target_columns`` become targets.

    All remaining columns are features unless ``feature_columns`` selects a
    subset. Row numbers in errors count data rows from 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise EmptyFile(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise EmptyFile(f"{path} has a header but no data rows")
    for name in target_columns:
        if name not in header:
            raise MissingColumn(name)
    if feature_columns is None:
        feature_columns = [h for h in header if h not in target_columns]
    else:
        for name in feature_columns:
            if name not in header:
                raise MissingColumn(name)
    f_idx = [header.index(h) for h in feature_columns]
    t_idx = [header.index(h) for h in target_columns]

    X = np.empty((len(body), len(f_idx)))
    Y = np.empty((len(body), len(t_idx)))
    for i, r in enumerate(body, start=1):
        if len(r) != len(header):
            raise ParseError(i, None, ",".join(r))
        for j, c in enumerate(f_idx):
            X[i - 1, j] = _parse(r[c].strip(), i, header[c])
        for j, c in enumerate(t_idx):
            Y[i - 1, j] = _parse(r[c].strip(), i, header[c])
    return Dataset(X, Y, list(feature_columns), list(target_columns))


def write_csv(data, path):
    """Write features then targets with shortest round-trip float text."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.feature_names + data.target_names)
        for x, y in zip(data.features, data.targets):
            w.writerow([repr(float(v)) for v in x] + [repr(float(v)) for v in y])


def ensure_positive(data, epsilon_pos=DEFAULT_EPSILON_POS):
    """Shift every column whose minimum is <= 0 so that its minimum becomes ``epsilon_pos``."""
    if epsilon_pos <= 0:
        raise ValueError("epsilon_pos must be positive")
    mins = data.features.min(axis=0)
    shift = np.where(mins <= 0, -mins + epsilon_pos, 0.0)
    # the sum mins + shift can round below epsilon_pos; bump the shift by ulps
    short = (mins <= 0) & (mins + shift < epsilon_pos)
    while short.any():
        shift[short] = np.nextafter(shift[short], np.inf)
        short &= mins + shift < epsilon_pos
    return replace(data, features=data.features + shift, shifts=data.shifts + shift)


def minmax_positive(data, epsilon_pos=DEFAULT_EPSILON_POS):
    """Map each column onto ``[epsilon_pos, 1 + epsilon_pos]``; constant columns go to 1."""
    lo = data.features.min(axis=0)
    span = data.features.max(axis=0) - lo
    varying = span > 0
    scale = np.where(varying, 1.0 / np.where(varying, span, 1.0), 1.0)
    offset = np.where(varying, -lo * scale + epsilon_pos, 1.0 - lo)
    # compose with any earlier transform: t = (x*s0 + o0)*scale + offset
    return replace(
        data,
        features=data.features * scale + offset,
        scales=data.scales * scale,
        shifts=data.shifts * scale + offset,
    )


def split(data, train_fraction=0.8, seed=42):
    """Deterministic shuffled train/test partition.

    The train side receives ``floor(N * train_fraction)`` rows, clamped so
    that both sides keep at least one row.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    if data.n < 2:
        raise TooFewRows(f"cannot split {data.n} row(s)")
    n_train = math.floor(data.n * train_fraction + 1e-9)
    n_train = min(max(n_train, 1), data.n - 1)
    perm = np.random.default_rng(seed).permutation(data.n)
    tr, te = perm[:n_train], perm[n_train:]
    return SplitDataset(data.take(tr), data.take(te), seed, train_fraction, tr, te)
