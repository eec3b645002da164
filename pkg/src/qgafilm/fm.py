"""Second-order factorization machine regressor trained by SGD.

    y_hat(x) = w0 + sum_i w_i x_i + sum_{i<j} <v_i, v_j> x_i x_j

The pairwise term is evaluated via the usual O(p * rank) identity
0.5 * sum_f [(sum_i v_if x_i)^2 - sum_i v_if^2 x_i^2]. Training
minimizes per-sample squared error with L2 on w and V (w0 is left
unregularized), one SGD step per row, rows reshuffled every epoch
with the seeded generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset

FM_FORMAT = "qgafilm-factorization-machine"
FM_VERSION = 1
INIT_SCALE = 0.01  # stdev of the latent factor init (libFM default)


@dataclass(frozen=True)
class FmConfig:
    latent_rank: int = 8
    learning_rate: float = 1e-2
    epochs: int = 500
    l2_penalty: float = 1e-4
    rng_seed: int = 0

    def __post_init__(self):
        if self.latent_rank < 1:
            raise ValueError("latent_rank must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.l2_penalty < 0:
            raise ValueError("l2_penalty must be non-negative")


class FmDivergenceError(ArithmeticError):
    pass


class FmModel:
    def __init__(self, w0: float, w: np.ndarray, v: np.ndarray, config: FmConfig):
        self.w0 = float(w0)
        self.w = np.asarray(w, dtype=float)
        self.v = np.asarray(v, dtype=float)
        self.config = config

    @property
    def code_length(self) -> int:
        return len(self.w)

    def predict(self, code) -> float:
        x = np.asarray(code, dtype=float)
        if x.shape != (self.code_length,):
            raise ValueError(f"code shape {x.shape} != ({self.code_length},)")
        return _predict_one(self.w0, self.w, self.v, x)

    def predict_many(self, codes) -> np.ndarray:
        x = np.atleast_2d(np.asarray(codes, dtype=float))
        if x.shape[1] != self.code_length:
            raise ValueError(f"code length {x.shape[1]} != training length "
                             f"{self.code_length}")
        s = x @ self.v                      # (m, rank)
        sq = (x**2) @ (self.v**2)           # (m, rank)
        return self.w0 + x @ self.w + 0.5 * np.sum(s**2 - sq, axis=1)


def _predict_one(w0: float, w: np.ndarray, v: np.ndarray, x: np.ndarray) -> float:
    s = x @ v
    sq = (x**2) @ (v**2)
    return float(w0 + x @ w + 0.5 * np.sum(s**2 - sq))


def _loss_one(w0, w, v, x, y, l2) -> float:
    err = _predict_one(w0, w, v, x) - y
    return float(err**2 + l2 * (np.sum(w**2) + np.sum(v**2)))


def _gradients_one(w0, w, v, x, y, l2):
    """Exact gradients of `_loss_one` in (w0, w, v)."""
    s = x @ v
    err = _predict_one(w0, w, v, x) - y
    g_w0 = 2.0 * err
    g_w = 2.0 * err * x + 2.0 * l2 * w
    g_v = 2.0 * err * (np.outer(x, s) - v * (x**2)[:, None]) + 2.0 * l2 * v
    return g_w0, g_w, g_v


def fm_train(data: LabeledDataset, config: FmConfig) -> FmModel:
    """SGD on per-sample loss (y_hat - y)^2 + l2 (|w|^2 + |V|^2).

    The inner loop exploits binary inputs (only active rows of V enter the
    error gradient; the L2 term shrinks everything) but applies exactly the
    gradients of `_gradients_one`, which the test suite checks against
    finite differences and against this loop step for step.
    """
    if len(data) < 2:
        raise ValueError("need at least 2 training rows")
    x = data.codes().astype(bool)
    y = data.labels()
    rng = np.random.default_rng(config.rng_seed)
    p = x.shape[1]
    w0 = 0.0
    w = np.zeros(p)
    v = rng.normal(0.0, INIT_SCALE, size=(p, config.latent_rank))

    lr = config.learning_rate
    shrink = 1.0 - 2.0 * lr * config.l2_penalty
    active_rows = [np.flatnonzero(row) for row in x]
    with np.errstate(over="ignore", invalid="ignore"):  # caught at epoch end
        for epoch in range(config.epochs):
            order = rng.permutation(len(x))
            epoch_error = 0.0
            for i in order:
                act = active_rows[i]
                v_act = v[act]
                s = v_act.sum(axis=0)
                pred = w0 + w[act].sum() + 0.5 * (s @ s - (v_act * v_act).sum())
                err2 = 2.0 * (pred - y[i])
                epoch_error += (pred - y[i]) ** 2
                w0 -= lr * err2
                w *= shrink
                w[act] -= lr * err2
                v *= shrink
                v[act] -= (lr * err2) * (s[None, :] - v_act)
            if not np.isfinite(epoch_error):
                raise FmDivergenceError(
                    f"training loss became non-finite at epoch {epoch}; "
                    f"lower the learning rate")
    return FmModel(w0, w, v, config)


def fm_save(model: FmModel, path) -> None:
    payload = {
        "format": FM_FORMAT,
        "version": FM_VERSION,
        "w0": model.w0,
        "w": model.w.tolist(),
        "v": model.v.tolist(),
        "config": {
            "latent_rank": model.config.latent_rank,
            "learning_rate": model.config.learning_rate,
            "epochs": model.config.epochs,
            "l2_penalty": model.config.l2_penalty,
            "rng_seed": model.config.rng_seed,
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def fm_load(path) -> FmModel:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != FM_FORMAT:
        raise ValueError(f"{path} is not a factorization machine model file")
    if payload.get("version") != FM_VERSION:
        raise ValueError(f"unsupported model version {payload.get('version')}")
    return FmModel(payload["w0"], payload["w"], payload["v"],
                   FmConfig(**payload["config"]))
