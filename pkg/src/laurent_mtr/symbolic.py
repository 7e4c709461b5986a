"""Closed-form equations read off a trained model.

The symbolic view snaps every block exponent onto a grid of width
``precision`` and evaluates the resulting monomials by direct powering.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ShapeMismatch, UnknownFormat
from .model import check_positive

DEFAULT_PRECISION = 0.01
LAURENT_PRECISION = 1.0
DEFAULT_PRUNE = 1e-3


def round_half_away(v):
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.floor(np.abs(v) + 0.5)


def rounded(exponents, precision):
    if precision <= 0:
        raise ValueError("precision must be positive")
    # adding 0.0 turns -0.0 into 0.0
    return precision * round_half_away(np.asarray(exponents, dtype=float) / precision) + 0.0


def round_exponents(model, precision):
    out = model.copy()
    out.exponents = rounded(model.exponents, precision)
    return out


def monomials(exponents, X):
    """``prod_i X[n, i] ** exponents[k, i]`` by direct powering, shape (N, K)."""
    X = check_positive(np.atleast_2d(X))
    if X.shape[1] != exponents.shape[1]:
        raise ShapeMismatch(f"expected {exponents.shape[1]} features, got {X.shape[1]}")
    with np.errstate(over="ignore"):
        return np.prod(X[:, None, :] ** exponents[None, :, :], axis=2)


def monomial_features(model, x, precision=DEFAULT_PRECISION):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    m = monomials(rounded(model.exponents, precision), np.atleast_2d(x))
    return m[0] if single else m


def symbolic_predict(model, x, precision=DEFAULT_PRECISION):
    """Bias plus coefficient-weighted monomial features; accepts one row or a batch."""
    x = np.asarray(x, dtype=float)
    m = monomial_features(model, np.atleast_2d(x), precision)
    y = m @ model.coefficients.T + model.biases
    return y[0] if x.ndim == 1 else y


@dataclass
class Term:
    coefficient: float
    exponents: list


@dataclass
class SymbolicEquation:
    bias: float
    terms: list
    feature_names: list
    target_name: str = "y"

    @property
    def n_terms(self):
        return len(self.terms)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["terms"] = [Term(**t) for t in d["terms"]]
        return cls(**d)


def default_feature_names(d):
    return [f"x{i}" for i in range(1, d + 1)]


def extract_equations(model, precision=DEFAULT_PRECISION, prune_threshold=DEFAULT_PRUNE,
                      feature_names=None, target_names=None, relative=False):
    """One equation per target, terms in block order.

    Terms with ``|coefficient| < prune_threshold`` are dropped; with
    ``relative=True`` the threshold is a fraction of the head's largest
    ``|coefficient|``.
    """
    if prune_threshold < 0:
        raise ValueError("prune_threshold must be >= 0")
    names = feature_names or default_feature_names(model.input_dim)
    targets = target_names or (["y"] if model.n_targets == 1 else
                               [f"y{t}" for t in range(1, model.n_targets + 1)])
    W = rounded(model.exponents, precision)
    eqs = []
    for t in range(model.n_targets):
        c = model.coefficients[t]
        thr = prune_threshold
        if relative and c.size:
            thr = prune_threshold * float(np.max(np.abs(c)))
        terms = [Term(float(c[k]), W[k].tolist())
                 for k in range(model.n_blocks) if abs(c[k]) >= thr]
        eqs.append(SymbolicEquation(float(model.biases[t]), terms, list(names), targets[t]))
    return eqs


def _num(v):
    return f"{v:.4g}"


def _exp(e):
    return f"{e:.10g}"


def _text_term(term, names):
    factors = []
    for name, e in zip(names, term.exponents):
        if e == 0:
            continue
        factors.append(name if e == 1 else f"{name}^{_exp(e)}")
    return "·".join([_num(abs(term.coefficient))] + factors)


def _latex_name(name):
    return "\\mathrm{" + name.replace("_", "\\_") + "}"


def _latex_term(term, names):
    factors = []
    for name, e in zip(names, term.exponents):
        if e == 0:
            continue
        base = _latex_name(name)
        factors.append(base if e == 1 else f"{base}^{{{_exp(e)}}}")
    return " ".join([_num(abs(term.coefficient))] + factors)


def render_equation(eq, format="text"):
    if format == "json":
        return json.dumps(eq.to_dict())
    if format == "text":
        fmt, lhs = _text_term, eq.target_name
    elif format == "latex":
        fmt, lhs = _latex_term, _latex_name(eq.target_name)
    else:
        raise UnknownFormat(format)
    out = f"{lhs} = {_num(eq.bias)}"
    for term in eq.terms:
        sign = "-" if term.coefficient < 0 else "+"
        out += f" {sign} {fmt(term, eq.feature_names)}"
    return out


def parse_equation_json(text):
    return SymbolicEquation.from_dict(json.loads(text))


def evaluate_equation(eq, X):
    """Evaluate one equation (-> shape (N,)) or a list of them (-> shape (N, M))."""
    if isinstance(eq, (list, tuple)):
        return np.column_stack([evaluate_equation(e, X) for e in eq])
    X = check_positive(np.atleast_2d(X))
    if X.shape[1] != len(eq.feature_names):
        raise ShapeMismatch(f"equation uses {len(eq.feature_names)} features, got {X.shape[1]}")
    y = np.full(X.shape[0], eq.bias)
    if not eq.terms:
        return y
    W = np.asarray([t.exponents for t in eq.terms], dtype=float)
    c = np.asarray([t.coefficient for t in eq.terms])
    return y + monomials(W, X) @ c


def equations_document(eqs, **metadata):
    return {"equations": [e.to_dict() for e in eqs], "metadata": metadata}


def save_equations(eqs, path, **metadata):
    with open(path, "w") as fh:
        json.dump(equations_document(eqs, **metadata), fh, indent=2)


def load_equations(path):
    with open(path) as fh:
        doc = json.load(fh)
    return [SymbolicEquation.from_dict(e) for e in doc["equations"]], doc.get("metadata", {})

