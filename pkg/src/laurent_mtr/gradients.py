"""Analytic gradients of the training loss and a finite-difference checker.

Loss components (all means run over samples and targets):

    task = mean((yhat - y)^2)
    sym  = mean((ysym - y)^2)       ysym uses rounded exponents
    l1   = sum|exponents| + sum|coefficients|
    l2   = sum exponents^2 + sum coefficients^2

Biases are not regularised. Rounding in the symbolic branch is
differentiated straight-through: the snapped exponents are treated as
``exponents + const`` so gradients reach the blocks.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch
from .model import Model, block_log_outputs, check_positive, combine_heads
from .symbolic import rounded

COMPONENTS = ("task", "sym", "l1", "l2")


@dataclass
class GradientSet:
    exponents: np.ndarray
    coefficients: np.ndarray
    biases: np.ndarray

    @classmethod
    def zeros_like(cls, model):
        return cls(np.zeros_like(model.exponents), np.zeros_like(model.coefficients),
                   np.zeros_like(model.biases))

    def vector(self):
        return np.concatenate([self.exponents.ravel(), self.coefficients.ravel(), self.biases])

    def norm(self):
        return float(np.sqrt(np.sum(self.vector() ** 2)))

    def scaled(self, a):
        return GradientSet(self.exponents * a, self.coefficients * a, self.biases * a)

    def __add__(self, other):
        return GradientSet(self.exponents + other.exponents,
                           self.coefficients + other.coefficients,
                           self.biases + other.biases)

    def clipped(self, max_norm):
        n = self.norm()
        if not np.isfinite(n):
            return GradientSet(np.zeros_like(self.exponents), np.zeros_like(self.coefficients),
                               np.zeros_like(self.biases))
        return self.scaled(max_norm / n) if n > max_norm else self


@dataclass
class LossBreakdown:
    task: float
    sym: float
    l1: float
    l2: float
    total: float

    def as_dict(self):
        return {"task": self.task, "sym": self.sym, "l1": self.l1, "l2": self.l2,
                "total": self.total}


def _weights(config):
    return {"task": 1.0, "sym": config.effective_lambda_sym,
            "l1": config.lambda_l1, "l2": config.lambda_l2}


def _check(model, X, Y):
    X = check_positive(np.atleast_2d(X))
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[1] != model.input_dim or Y.shape != (X.shape[0], model.n_targets):
        raise ShapeMismatch(
            f"model expects ({model.input_dim}, {model.n_targets}); got X {X.shape}, Y {Y.shape}"
        )
    return X, Y


def _head_branch(model, feats, log_feats_ok, log_X, Y):
    """MSE of ``feats @ C.T + b`` against Y and its gradients.

    ``feats`` are block outputs (or monomials) of shape (N, K); the exponent
    gradient uses d feats[n,k] / d w[k,i] = feats[n,k] * log X[n,i], masked
    to zero where the log-domain value was clamped.
    """
    N, M = Y.shape
    pred = combine_heads(feats, model.coefficients, model.biases)
    resid = pred - Y
    value = float(np.mean(resid ** 2))
    g_pred = 2.0 * resid / (N * M)
    g_C = g_pred.T @ feats
    g_b = g_pred.sum(axis=0)
    g_feats = g_pred @ model.coefficients
    g_s = np.where(log_feats_ok, g_feats * feats, 0.0)
    g_W = g_s.T @ log_X
    return value, GradientSet(g_W, g_C, g_b)


def component_gradients(model, X, Y, precision, offset=None):
    """Unweighted value and gradient of every loss component.

    ``offset`` overrides the rounding shift ``rounded(W) - W`` of the
    symbolic branch; the finite-difference checker freezes it so that the
    checked function is exactly the straight-through surrogate.
    """
    X, Y = _check(model, X, Y)
    log_X = np.log(X)
    W, C = model.exponents, model.coefficients

    s, clamped = block_log_outputs(W, log_X, model.diagnostics)
    task = _head_branch(model, np.exp(s), ~clamped, log_X, Y)

    W_sym = rounded(W, precision) if offset is None else W + offset
    s_sym, clamped_sym = block_log_outputs(W_sym, log_X)
    sym = _head_branch(model, np.exp(s_sym), ~clamped_sym, log_X, Y)

    l1 = (float(np.abs(W).sum() + np.abs(C).sum()),
          GradientSet(np.sign(W), np.sign(C), np.zeros_like(model.biases)))
    l2 = (float((W ** 2).sum() + (C ** 2).sum()),
          GradientSet(2.0 * W, 2.0 * C, np.zeros_like(model.biases)))
    return {"task": task, "sym": sym, "l1": l1, "l2": l2}


def combine(components, config):
    w = _weights(config)
    values = {k: components[k][0] for k in COMPONENTS}
    total = sum(w[k] * values[k] for k in COMPONENTS)
    grad = None
    for k in COMPONENTS:
        g = components[k][1].scaled(w[k])
        grad = g if grad is None else grad + g
    return LossBreakdown(total=total, **values), grad


def backward(model, X, Y, config, offset=None):
    """Total loss breakdown and its exact gradient (unclipped)."""
    return combine(component_gradients(model, X, Y, config.precision, offset), config)


def total_loss(model, X, Y, config, offset=None):
    return backward(model, X, Y, config, offset)[0].total


def _model_from_vector(template, v):
    K, d = template.exponents.shape
    M = template.n_targets
    a, b = K * d, K * d + M * K
    return Model(v[:a].reshape(K, d), v[a:b].reshape(M, K), v[b:])


def finite_difference_check(model, X, Y, config, h=1e-5, floor=1e-6, return_details=False):
    """Max relative error between analytic and central-difference gradients.

    Coordinates within ``10*h`` of the L1 kink are skipped when the L1
    weight is positive. The relative error of a coordinate is
    ``|a - f| / max(|a|, |f|, floor)``.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ValueError("h must lie in [1e-7, 1e-3]")
    offset = rounded(model.exponents, config.precision) - model.exponents
    _, grad = backward(model, X, Y, config, offset)
    analytic = grad.vector()
    theta = model.parameter_vector()
    n_reg = model.exponents.size + model.coefficients.size

    numeric = np.zeros_like(theta)
    for j in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[j] += h
        down[j] -= h
        f_up = total_loss(_model_from_vector(model, up), X, Y, config, offset)
        f_down = total_loss(_model_from_vector(model, down), X, Y, config, offset)
        numeric[j] = (f_up - f_down) / (2.0 * h)

    keep = np.ones(theta.size, dtype=bool)
    if config.lambda_l1 > 0:
        keep[:n_reg] = np.abs(theta[:n_reg]) >= 10.0 * h
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    rel = np.abs(analytic - numeric) / denom
    err = float(rel[keep].max()) if keep.any() else 0.0
    if return_details:
        return err, {"analytic": analytic, "numeric": numeric, "excluded": ~keep}
    return err
