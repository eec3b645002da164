"""Shared surrogate harness: training dispatch, RMSE, cross-validation, io."""

from __future__ import annotations

import json
import math

import numpy as np

from .dataset import LabeledDataset
from .fm import FM_FORMAT, FmConfig, FmModel, fm_load, fm_save, fm_train
from .forest import RF_FORMAT, ForestConfig, RandomForestModel, rf_load, rf_save, rf_train

SURROGATE_KINDS = ("rf", "fm")


def train_surrogate(kind: str, data: LabeledDataset,
                    rf_config: ForestConfig | None = None,
                    fm_config: FmConfig | None = None):
    if kind == "rf":
        return rf_train(data, rf_config if rf_config is not None else ForestConfig())
    if kind == "fm":
        return fm_train(data, fm_config if fm_config is not None else FmConfig())
    raise ValueError(f"unknown surrogate kind {kind!r}; expected one of {SURROGATE_KINDS}")


def evaluate_rmse(model, test: LabeledDataset) -> float:
    if len(test) == 0:
        raise ValueError("empty test set")
    predictions = model.predict_many(test.codes())
    return float(math.sqrt(np.mean((predictions - test.labels()) ** 2)))


def cross_validate(data: LabeledDataset, k: int, trainer, rng_seed: int = 0) -> list[float]:
    """k-fold CV: seeded balanced partition, RMSE on each held-out fold.

    `trainer` maps a LabeledDataset to a fitted model.
    """
    if k < 2:
        raise ValueError("need k >= 2 folds")
    if len(data) < k:
        raise ValueError(f"{len(data)} rows cannot fill {k} folds")
    rng = np.random.default_rng(rng_seed)
    order = rng.permutation(len(data))
    folds = np.array_split(order, k)
    scores = []
    for held_out in folds:
        train_idx = np.setdiff1d(order, held_out, assume_unique=True)
        model = trainer(data.subset(train_idx))
        scores.append(evaluate_rmse(model, data.subset(held_out)))
    return scores


def save_model(model, path) -> None:
    if isinstance(model, RandomForestModel):
        rf_save(model, path)
    elif isinstance(model, FmModel):
        fm_save(model, path)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")


def load_model(path):
    with open(path) as fh:
        fmt = json.load(fh).get("format")
    if fmt == RF_FORMAT:
        return rf_load(path)
    if fmt == FM_FORMAT:
        return fm_load(path)
    raise ValueError(f"{path}: unrecognized model format {fmt!r}")
