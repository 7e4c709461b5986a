"""Growing power-term networks that fit Laurent-polynomial equations to
multi-target regression data and print them in closed form."""

from .baseline import LinearModel, fit_linear, predict_linear
from .config import TrainConfig
from .dataset import Dataset, SplitDataset, ensure_positive, load_csv, minmax_positive, split, write_csv
from .errors import LaurentMTRError
from .metrics import MetricsReport, mae, mape, report, rmse
from .model import Model, forward, forward_batch, init_model
from .symbolic import (SymbolicEquation, Term, evaluate_equation, extract_equations,
                       render_equation, round_exponents, symbolic_predict)
from .training import TrainReport, growth_schedule, train

__version__ = "0.1.0"

__all__ = [
    "Dataset", "LaurentMTRError", "LinearModel", "MetricsReport", "Model", "SplitDataset",
    "SymbolicEquation", "Term", "TrainConfig", "TrainReport", "ensure_positive",
    "evaluate_equation", "extract_equations", "fit_linear", "forward", "forward_batch",
    "growth_schedule", "init_model", "load_csv", "mae", "mape", "minmax_positive",
    "predict_linear", "render_equation", "report", "rmse", "round_exponents", "split",
    "symbolic_predict", "train", "write_csv",
]
