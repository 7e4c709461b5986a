"""Noise-free data drawn from known Laurent-polynomial equations."""

import numpy as np

from .dataset import Dataset

# y1 = 2 * x1^2 * x2^-1 + 3,  y2 = x1 * x2  as (bias, [(coefficient, exponents), ...])
RECOVERY_EQUATIONS = (
    (3.0, [(2.0, (2, -1))]),
    (0.0, [(1.0, (1, 1))]),
)


def evaluate_truth(equations, X):
    X = np.asarray(X, dtype=float)
    cols = []
    for bias, terms in equations:
        y = np.full(X.shape[0], bias)
        for coef, exps in terms:
            y = y + coef * np.prod(X ** np.asarray(exps, dtype=float), axis=1)
        cols.append(y)
    return np.column_stack(cols)


def recovery_dataset(n=500, seed=0, low=0.5, high=2.0, equations=RECOVERY_EQUATIONS):
    rng = np.random.default_rng(seed)
    d = len(equations[0][1][0][1])
    X = rng.uniform(low, high, size=(n, d))
    Y = evaluate_truth(equations, X)
    return Dataset(X, Y, [f"x{i}" for i in range(1, d + 1)],
                   [f"y{t}" for t in range(1, len(equations) + 1)])
