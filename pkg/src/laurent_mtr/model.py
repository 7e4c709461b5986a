"""Shared power-term blocks with per-target linear heads.

Each block computes ``prod_i x_i ** w_i`` through ``exp(sum_i w_i * log x_i)``;
each target head is an affine combination of the block outputs.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import NonPositiveInput, ShapeMismatch

INIT_SCALE = 0.1
LOG_CLAMP = 700.0


@dataclass
class Diagnostics:
    clamp_events: int = 0


@dataclass
class Model:
    """Parameters of the network.

    exponents:    (K, d) one row per power-term block
    coefficients: (M, K) one row per target head
    biases:       (M,)
    """

    exponents: np.ndarray
    coefficients: np.ndarray
    biases: np.ndarray
    diagnostics: Diagnostics = field(default_factory=Diagnostics, compare=False, repr=False)

    def __post_init__(self):
        self.exponents = np.atleast_2d(np.asarray(self.exponents, dtype=float))
        self.coefficients = np.atleast_2d(np.asarray(self.coefficients, dtype=float))
        self.biases = np.atleast_1d(np.asarray(self.biases, dtype=float))
        K, _ = self.exponents.shape
        if self.coefficients.shape != (self.biases.size, K):
            raise ShapeMismatch(
                f"heads {self.coefficients.shape} incompatible with {K} blocks "
                f"and {self.biases.size} biases"
            )

    @property
    def input_dim(self):
        return self.exponents.shape[1]

    @property
    def n_blocks(self):
        return self.exponents.shape[0]

    @property
    def n_targets(self):
        return self.biases.size

    def copy(self):
        return Model(self.exponents.copy(), self.coefficients.copy(), self.biases.copy())

    def parameter_vector(self):
        return np.concatenate([self.exponents.ravel(), self.coefficients.ravel(), self.biases])

    def to_dict(self):
        return {
            "input_dim": self.input_dim,
            "blocks": self.exponents.tolist(),
            "heads": [
                {"coeffs": c.tolist(), "bias": float(b)}
                for c, b in zip(self.coefficients, self.biases)
            ],
        }

    @classmethod
    def from_dict(cls, d):
        blocks = np.asarray(d["blocks"], dtype=float).reshape(-1, d["input_dim"])
        coeffs = np.asarray([h["coeffs"] for h in d["heads"]], dtype=float)
        coeffs = coeffs.reshape(len(d["heads"]), blocks.shape[0])
        return cls(blocks, coeffs, [h["bias"] for h in d["heads"]])

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def check_positive(X):
    X = np.asarray(X, dtype=float)
    if not np.all(X > 0):
        raise NonPositiveInput("power-term blocks need strictly positive inputs")
    return X


def _check_width(model, X):
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ShapeMismatch(f"expected {model.input_dim} features, got shape {X.shape}")


def block_log_outputs(exponents, log_X, diagnostics=None):
    """Clamped log-domain block outputs ``log_X @ exponents.T``, shape (N, K).

    Accumulates feature by feature so each entry's rounding is independent
    of how many blocks exist.
    """
    s = np.zeros((log_X.shape[0], exponents.shape[0]))
    for i in range(log_X.shape[1]):
        s += log_X[:, i:i + 1] * exponents[:, i]
    clamped = np.abs(s) > LOG_CLAMP
    if diagnostics is not None and clamped.any():
        diagnostics.clamp_events += int(clamped.sum())
    return np.clip(s, -LOG_CLAMP, LOG_CLAMP), clamped


def forward_block(exponents, x):
    w = np.asarray(exponents, dtype=float).ravel()
    x = check_positive(np.asarray(x, dtype=float).ravel())
    if x.size != w.size:
        raise ShapeMismatch(f"block has {w.size} exponents, input has {x.size}")
    s = float(np.dot(w, np.log(x)))
    return float(np.exp(min(max(s, -LOG_CLAMP), LOG_CLAMP)))


def block_activations(model, X):
    """Block outputs ``p``, shape (N, K)."""
    X = check_positive(np.atleast_2d(X))
    _check_width(model, X)
    s, _ = block_log_outputs(model.exponents, np.log(X), model.diagnostics)
    return np.exp(s)


def combine_heads(P, coefficients, biases):
    """``biases + P @ coefficients.T`` summed block by block, left to right."""
    out = np.zeros((P.shape[0], coefficients.shape[0]))
    for k in range(P.shape[1]):
        out += P[:, k:k + 1] * coefficients[:, k]
    return out + biases


def forward_batch(model, X):
    """Predictions for every row of ``X``, shape (N, M)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _check_width(model, X)
    return combine_heads(block_activations(model, X), model.coefficients, model.biases)


def forward(model, x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeMismatch("forward takes a single row; use forward_batch")
    return forward_batch(model, x[None, :])[0]


def draw_blocks(rng, n, d):
    return rng.normal(0.0, INIT_SCALE, size=(n, d))


def init_model(d, m, k_init, seed=0, rng=None):
    """Random model with ``k_init`` blocks.

    Exponents and head coefficients are N(0, 0.1^2), biases zero. Pass
    ``rng`` to continue an existing seed stream (used by growth).
    """
    if min(d, m, k_init) < 1:
        raise ValueError("d, m and k_init must all be >= 1")
    rng = np.random.default_rng(seed) if rng is None else rng
    exponents = draw_blocks(rng, k_init, d)
    coefficients = rng.normal(0.0, INIT_SCALE, size=(m, k_init))
    return Model(exponents, coefficients, np.zeros(m))
