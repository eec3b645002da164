"""Classical baselines: generational GA and brute-force enumeration.

Both maximize the same fitness callables as the quantum-inspired
optimizer and reuse its trace record, so evaluation counts compare
one-to-one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .encoding import int_to_code
from .qga import EvolveError, GenerationRecord

EXHAUSTIVE_CODE_LENGTH_CAP = 20  # 2 bits * 10 layers = 4^10 evaluations


class ExhaustiveResult(NamedTuple):
    best_code: np.ndarray
    best_fitness: float
    evaluations: int
    tie_count: int  # codes sharing the maximum; lexicographically first wins


def exhaustive_search(fitness_fn, code_length: int,
                      cap: int = EXHAUSTIVE_CODE_LENGTH_CAP) -> ExhaustiveResult:
    """Evaluate every code of the given length and return the global optimum."""
    if code_length > cap:
        raise ValueError(
            f"exhaustive search over 2^{code_length} codes exceeds the cap of "
            f"2^{cap}; use the heuristic optimizers for problems this large")
    best_value = -math.inf
    best_code = None
    ties = 0
    total = 1 << code_length
    for value in range(total):
        code = int_to_code(value, code_length)
        f = fitness_fn(code)
        if f > best_value:
            best_value = f
            best_code = code
            ties = 1
        elif f == best_value:
            ties += 1
    return ExhaustiveResult(best_code, float(best_value), total, ties)


@dataclass(frozen=True)
class CgaConfig:
    population_size: int
    generations: int
    crossover_rate: float = 0.8
    mutation_rate: float | None = None  # None -> 1/code_length at run time
    elitism_count: int = 1
    tournament_size: int = 3
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0,1]")
        if self.mutation_rate is not None and not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0,1]")
        if not 0 <= self.elitism_count <= self.population_size:
            raise ValueError("elitism_count must be in [0, population_size]")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


@dataclass
class CgaResult:
    best_code: np.ndarray
    best_fitness: float
    trace: list[GenerationRecord]
    evaluations: int


def cga_evolve(config: CgaConfig, fitness_fn, code_length: int) -> CgaResult:
    """Generational GA: tournament selection, single-point crossover,
    bit-flip mutation, elitism. Trace schema matches the QGA's."""
    rng = np.random.default_rng(config.rng_seed)
    pop_size = config.population_size
    mutation_rate = (config.mutation_rate if config.mutation_rate is not None
                     else 1.0 / code_length)

    population = rng.integers(0, 2, size=(pop_size, code_length), dtype=np.uint8)
    trace: list[GenerationRecord] = []
    best_code = None
    best_fitness = -math.inf
    evaluations = 0

    def evaluate(pop):
        nonlocal evaluations, best_code, best_fitness
        fits = np.empty(len(pop))
        for i, individual in enumerate(pop):
            try:
                fits[i] = fitness_fn(individual)
            except Exception as exc:
                raise EvolveError(f"fitness evaluation failed: {exc}", trace) from exc
        evaluations += len(pop)
        top = int(np.argmax(fits))
        if fits[top] > best_fitness:
            best_fitness = float(fits[top])
            best_code = pop[top].copy()
        return fits

    fitnesses = evaluate(population)
    trace.append(GenerationRecord(0, float(fitnesses.max()), float(fitnesses.mean()),
                                  best_fitness, best_code.copy()))

    for generation in range(1, config.generations + 1):
        order = np.argsort(-fitnesses, kind="stable")
        next_pop = [population[i].copy() for i in order[:config.elitism_count]]
        while len(next_pop) < pop_size:
            contenders = rng.integers(0, pop_size, size=config.tournament_size)
            p1 = population[contenders[np.argmax(fitnesses[contenders])]]
            contenders = rng.integers(0, pop_size, size=config.tournament_size)
            p2 = population[contenders[np.argmax(fitnesses[contenders])]]
            child1, child2 = p1.copy(), p2.copy()
            if rng.random() < config.crossover_rate and code_length > 1:
                cut = int(rng.integers(1, code_length))
                child1 = np.concatenate([p1[:cut], p2[cut:]])
                child2 = np.concatenate([p2[:cut], p1[cut:]])
            for child in (child1, child2):
                if len(next_pop) < pop_size:
                    flips = rng.random(code_length) < mutation_rate
                    child = child.copy()
                    child[flips] ^= 1
                    next_pop.append(child)
        population = np.asarray(next_pop, dtype=np.uint8)
        fitnesses = evaluate(population)
        trace.append(GenerationRecord(generation, float(fitnesses.max()),
                                      float(fitnesses.mean()),
                                      best_fitness, best_code.copy()))

    return CgaResult(best_code, best_fitness, trace, evaluations)
