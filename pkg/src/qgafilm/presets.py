"""Named per-N run presets (initial data, generations, iterations, population).

Each row pairs a layer count with its run budget; the implied
surrogate-evaluation totals are generations x iterations x population
(25,000 for n6 up to 50,000,000 for n20).
"""

from __future__ import annotations

import math

from .active_learning import LoopConfig
from .qga import QgaConfig, RotationSchedule

THETA_MAX = 0.1 * math.pi
THETA_MIN = 0.01 * math.pi
MUTATION_RATE = 0.001

# name -> (layers, initial dataset m, generations, iterations, population)
PRESET_TABLE: dict[str, tuple[int, int, int, int, int]] = {
    "n6": (6, 25, 100, 10, 25),
    "n8": (8, 25, 100, 10, 50),
    "n10": (10, 50, 200, 10, 50),
    "n12": (12, 100, 200, 15, 50),
    "n14": (14, 100, 400, 20, 100),
    "n16": (16, 150, 800, 50, 100),
    "n20": (20, 150, 1000, 100, 500),
}


def preset_names() -> list[str]:
    return list(PRESET_TABLE)


def preset_layers(name: str) -> int:
    return PRESET_TABLE[name][0]


def loop_config(name: str, surrogate: str = "rf", rng_seed: int = 0,
                stagnation_fraction: float = 0.5,
                memory_corruption_prob: float = 0.1,
                convergence_repeats: int = 3) -> LoopConfig:
    if name not in PRESET_TABLE:
        raise KeyError(f"unknown preset {name!r}; choose from {preset_names()}")
    _, m, generations, iterations, population = PRESET_TABLE[name]
    qga = QgaConfig(
        population_size=population,
        mutation_rate=MUTATION_RATE,
        schedule=RotationSchedule(THETA_MAX, THETA_MIN, generations),
        stagnation_fraction=stagnation_fraction,
        memory_corruption_prob=memory_corruption_prob,
        rng_seed=rng_seed,
    )
    return LoopConfig(
        initial_dataset_size=m,
        max_iterations=iterations,
        qga=qga,
        surrogate_choice=surrogate,
        convergence_repeats=convergence_repeats,
        rng_seed=rng_seed,
    )
