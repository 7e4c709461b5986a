"""Closed-form multi-target linear regression baseline."""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, SingularSystem

DEFAULT_RIDGE = 1e-8
MAX_CONDITION = 1e15


@dataclass
class LinearModel:
    weights: np.ndarray     # (d, M)
    intercepts: np.ndarray  # (M,)


def fit_linear(X, Y, ridge=DEFAULT_RIDGE):
    """Least squares via the normal equations on centred, unit-variance columns.

    Working in standardised units makes ``ridge`` a relative conditioning
    term; the solution is mapped back to the original feature scale.
    """
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise ShapeMismatch(f"X has {X.shape[0]} rows, Y has {Y.shape[0]}")

    x_mean, y_mean = X.mean(axis=0), Y.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - x_mean) / scale
    A = Z.T @ Z + ridge * np.eye(X.shape[1])
    B = Z.T @ (Y - y_mean)
    if np.linalg.cond(A) > MAX_CONDITION:
        raise SingularSystem(f"normal equations are singular (ridge={ridge})")
    try:
        W = np.linalg.solve(A, B) / scale[:, None]
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    return LinearModel(W, y_mean - x_mean @ W)


def predict_linear(model, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.weights.shape[0]:
        raise ShapeMismatch(f"expected {model.weights.shape[0]} features, got {X.shape[1]}")
    return X @ model.weights + model.intercepts
