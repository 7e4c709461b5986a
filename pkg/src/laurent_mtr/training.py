"""Full-batch Adam training with periodic block growth."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceDetected, NoGrowthWindow
from .gradients import backward
from .model import Model, draw_blocks, forward_batch, init_model

log = logging.getLogger(__name__)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
DIVERGENCE_WINDOW = 10

METRIC_COLUMNS = ("epoch", "task_loss", "sym_loss", "l1", "l2", "total", "val_loss", "K")


def growth_schedule(k_init, k_max, epochs, interval):
    """Growth events ``[(epoch, n_blocks_to_add), ...]``.

    Events sit at ``interval, 2*interval, ... < epochs``; the
    ``k_max - k_init`` new blocks are spread evenly with the remainder going
    to the earliest events. Events that would add nothing are omitted.
    """
    total = k_max - k_init
    if total < 0:
        raise ValueError("k_max must be >= k_init")
    if total == 0:
        return []
    n_events = (epochs - 1) // interval
    if n_events == 0:
        raise NoGrowthWindow(
            f"no growth epoch below {epochs} with interval {interval} to add {total} blocks"
        )
    base, rem = divmod(total, n_events)
    events = []
    for j in range(n_events):
        n = base + (1 if j < rem else 0)
        if n:
            events.append(((j + 1) * interval, n))
    return events


def grow(model, n_new, rng):
    """Append ``n_new`` blocks drawn from ``rng``; their head coefficients start at 0."""
    if n_new < 1:
        raise ValueError("n_new must be >= 1")
    new_blocks = draw_blocks(rng, n_new, model.input_dim)
    return Model(
        np.vstack([model.exponents, new_blocks]),
        np.hstack([model.coefficients, np.zeros((model.n_targets, n_new))]),
        model.biases.copy(),
    )


@dataclass
class Adam:
    """Adam with per-entry step counts, so entries added by growth get their
    own bias correction starting from zero moments."""

    lr: float
    m: list = None
    v: list = None
    t: list = None

    def step(self, params, grads):
        if self.m is None:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
            self.t = [np.zeros_like(p) for p in params]
        for p, g, m, v, t in zip(params, grads, self.m, self.v, self.t):
            t += 1.0
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * g
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * g * g
            m_hat = m / (1.0 - ADAM_BETA1 ** t)
            v_hat = v / (1.0 - ADAM_BETA2 ** t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    def grow(self, n_new):
        """Zero state for the block rows and head columns appended by ``grow``."""
        if self.m is None:
            return
        for state in (self.m, self.v, self.t):
            W, C = state[0], state[1]
            state[0] = np.vstack([W, np.zeros((n_new, W.shape[1]))])
            state[1] = np.hstack([C, np.zeros((C.shape[0], n_new))])


@dataclass
class EpochLog:
    epoch: int
    task_loss: float
    sym_loss: float
    l1: float
    l2: float
    total: float
    val_loss: float
    K: int

    def row(self):
        return [getattr(self, c) for c in METRIC_COLUMNS]


@dataclass
class TrainReport:
    history: list
    growth_events: list
    model: Model
    stopping_reason: str
    final_train_task_loss: float
    final_val_task_loss: float
    checkpoints: dict = field(default_factory=dict, repr=False)
    clamp_events: int = 0

    @property
    def epochs_run(self):
        return len(self.history)

    def summary(self):
        return {
            "epochs_run": self.epochs_run,
            "growth_events": [list(e) for e in self.growth_events],
            "stopping_reason": self.stopping_reason,
            "final_K": self.model.n_blocks,
            "final_train_task_loss": self.final_train_task_loss,
            "final_val_task_loss": self.final_val_task_loss,
            "clamp_events": self.clamp_events,
        }


def task_loss(model, X, Y):
    r = forward_batch(model, X) - Y
    return float(np.mean(r ** 2))


def validation_rows(n, fraction, seed):
    """Rows of the training split held back for early stopping (may be empty)."""
    n_val = math.floor(n * fraction + 1e-9)
    if fraction == 0 or n_val < 1 or n - n_val < 1:
        return np.arange(n), np.arange(0)
    perm = np.random.default_rng([seed, 1]).permutation(n)
    return np.sort(perm[n_val:]), np.sort(perm[:n_val])


def train(data, config, on_growth=None):
    """Fit a model on ``data.train``.

    Each epoch evaluates the loss breakdown and its gradient, clips the
    gradient to ``config.clip_norm``, takes one Adam step, and grows the
    model after the epochs listed by ``growth_schedule``.

    A ``config.val_fraction`` share of the training rows is held back for
    early stopping, which watches the full objective on those rows and is
    only armed after the last growth event; when it fires, the parameters
    with the best held-back objective since that event are restored.
    ``data.test`` is never touched.
    ``on_growth(epoch, before, after)`` is called at each growth instant.
    """
    fit_rows, val_rows = validation_rows(data.train.n, config.val_fraction, config.seed)
    X, Y = data.train.features[fit_rows], data.train.targets[fit_rows]
    Xv, Yv = data.train.features[val_rows], data.train.targets[val_rows]
    has_val = val_rows.size > 0
    schedule = dict(growth_schedule(config.k_init, config.k_max, config.epochs,
                                    config.grow_interval))
    last_growth = max(schedule, default=0)

    rng = np.random.default_rng(config.seed)
    model = init_model(X.shape[1], Y.shape[1], config.k_init, rng=rng)
    diag = model.diagnostics
    opt = Adam(config.learning_rate)

    history, events, checkpoints = [], [], {}
    best_val, best_model, since_best, bad_epochs = math.inf, None, 0, 0
    reason = "max_size_reached_then_completed" if schedule else "completed"

    for epoch in range(1, config.epochs + 1):
        loss, grad = backward(model, X, Y, config)
        val = task_loss(model, Xv, Yv) if has_val else math.nan
        history.append(EpochLog(epoch, loss.task, loss.sym, loss.l1, loss.l2, loss.total,
                                val, model.n_blocks))

        if not math.isfinite(loss.total):
            bad_epochs += 1
            if bad_epochs >= DIVERGENCE_WINDOW:
                raise DivergenceDetected(f"non-finite loss for {bad_epochs} epochs (epoch {epoch})")
        else:
            bad_epochs = 0

        if epoch > last_growth and has_val:
            objective = backward(model, Xv, Yv, config)[0].total
            if objective < best_val:
                best_val, best_model, since_best = objective, model.copy(), 0
            else:
                since_best += 1
            if since_best >= config.patience and epoch < config.epochs:
                model = best_model
                model.diagnostics = diag
                reason = "early_stopped"
                log.info("early stop at epoch %d (best held-out objective %.6g)", epoch, best_val)
                break

        g = grad.clipped(config.clip_norm)
        opt.step([model.exponents, model.coefficients, model.biases],
                 [g.exponents, g.coefficients, g.biases])

        if epoch in schedule:
            n_new = schedule[epoch]
            before = model.copy()
            model = grow(model, n_new, rng)
            model.diagnostics = diag
            opt.grow(n_new)
            events.append((epoch, n_new))
            log.info("epoch %d: grew by %d to K=%d", epoch, n_new, model.n_blocks)
            if on_growth is not None:
                on_growth(epoch, before, model.copy())

        if config.checkpoint_every and epoch % config.checkpoint_every == 0:
            checkpoints[epoch] = model.to_dict()

    checkpoints[len(history)] = model.to_dict()
    Xt, Yt = data.train.features, data.train.targets
    return TrainReport(
        history=history,
        growth_events=events,
        model=model,
        stopping_reason=reason,
        final_train_task_loss=task_loss(model, Xt, Yt),
        final_val_task_loss=task_loss(model, Xv, Yv) if has_val else math.nan,
        checkpoints=checkpoints,
        clamp_events=diag.clamp_events,
    )
