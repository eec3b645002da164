"""Quantum-inspired genetic algorithm over bit strings.

State is a single chromosome: an (n, 2) array of real amplitude pairs
(a_k, b_k) with a_k^2 + b_k^2 = 1, where b_k^2 is the probability that
a measurement yields bit 1 at position k. Evolution applies Ry
rotations steered by a direction table that compares each generation's
best measurement against the all-time best individual, plus X-gate
mutation. Fitness is maximized.

Reproducibility contract: all stochastic draws come from the single
generator passed to (or created by) `evolve`, in this fixed order per
generation: (1) population_size * n measurement uniforms, row-major;
(2) one coin per qubit that hits a +/- entry of the direction table,
ascending qubit index; (3) n mutation uniforms. Chromosome
construction draws n angle uniforms (tau=0), or n for the fresh part
of a warm-start blend (tau>0). `memory_corrupt` draws exactly one
uniform per call regardless of probability.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

SQRT_HALF = 1.0 / math.sqrt(2.0)


def hadamard_init() -> np.ndarray:
    """Uniform superposition pair (1/sqrt2, 1/sqrt2)."""
    return np.array([SQRT_HALF, SQRT_HALF])


def ry_apply(pair, theta: float) -> np.ndarray:
    """Rotate an amplitude pair by theta; renormalized to unit norm."""
    a, b = float(pair[0]), float(pair[1])
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    a2 = a * c - b * s
    b2 = a * s + b * c
    norm = math.hypot(a2, b2)
    return np.array([a2 / norm, b2 / norm])


def x_apply(pair) -> np.ndarray:
    """Swap the amplitudes (Pauli-X): (a, b) -> (b, a)."""
    return np.array([float(pair[1]), float(pair[0])])


@dataclass(frozen=True)
class RotationSchedule:
    """Linear decay of the rotation angle from theta_max to theta_min."""

    theta_max: float
    theta_min: float
    max_generations: int

    def __post_init__(self):
        if not (self.theta_max >= self.theta_min > 0):
            raise ValueError("need theta_max >= theta_min > 0")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")


def rotation_angle(schedule: RotationSchedule, generation: int) -> float:
    """Angle for the given generation; clamps to theta_min past the end."""
    if generation < 0:
        raise ValueError("generation must be non-negative")
    span = schedule.theta_max - schedule.theta_min
    theta = schedule.theta_max - span * generation / schedule.max_generations
    return max(theta, schedule.theta_min)


def rotation_direction(x_bit: int, best_bit: int, x_exceeds_best: bool,
                       a: float, b: float, rng) -> int:
    """Sign of the rotation for one qubit (0 = leave amplitudes untouched).

    Matching bits never rotate. Otherwise the rotation pulls the
    measurement probability toward the best individual's bit, or toward
    the measured bit when that measurement strictly beat the best.
    Positive sign rotates toward |1>. The a=0 / b=0 rows that the
    strategy leaves free are resolved by a fair coin from `rng`.
    """
    if x_bit == best_bit:
        return 0
    target = x_bit if x_exceeds_best else best_bit
    ab = a * b
    if target == 1:
        if ab > 0:
            return 1
        if ab < 0:
            return -1
        if a == 0.0:
            return 0
        return 1 if rng.random() < 0.5 else -1
    if ab > 0:
        return -1
    if ab < 0:
        return 1
    if b == 0.0:
        return 0
    return 1 if rng.random() < 0.5 else -1


def measure(chromosome: np.ndarray, rng) -> np.ndarray:
    """Sample one bit string; bit k is 1 with probability b_k^2.

    The chromosome is not modified: measurements within a generation
    sample the same distribution.
    """
    probs = chromosome[:, 1] ** 2
    return (rng.random(len(chromosome)) < probs).astype(np.uint8)


def measure_many(chromosome: np.ndarray, count: int, rng) -> np.ndarray:
    """`count` independent measurements as rows; draw-for-draw identical to
    `count` sequential `measure` calls on the same generator."""
    probs = chromosome[:, 1] ** 2
    return (rng.random((count, len(chromosome))) < probs).astype(np.uint8)


def mutate(chromosome: np.ndarray, mutation_rate: float, rng) -> np.ndarray:
    """Swap each qubit's amplitudes independently with the given probability."""
    mask = rng.random(len(chromosome)) < mutation_rate
    out = chromosome.copy()
    out[mask] = out[mask, ::-1]
    return out


def fresh_chromosome(code_length: int, rng) -> np.ndarray:
    """Random init: Ry(theta) on the uniform superposition, theta ~ U[0, pi]."""
    theta = rng.random(code_length) * math.pi
    c = np.cos(0.5 * theta)
    s = np.sin(0.5 * theta)
    a = SQRT_HALF * (c - s)
    b = SQRT_HALF * (s + c)
    return np.column_stack([a, b])


def warm_start(previous: np.ndarray | None, w_p: float, code_length: int, rng) -> np.ndarray:
    """Initial chromosome for an iteration.

    First iteration (previous=None): fully random, as `fresh_chromosome`.
    Later iterations: per-qubit convex blend w_p * previous amplitudes +
    (1 - w_p) * fresh random pair, renormalized to unit norm (the blend
    of two unit vectors is generally not unit).
    """
    if not 0.0 <= w_p <= 0.5:
        raise ValueError(f"w_p must be in [0, 0.5], got {w_p}")
    if previous is None:
        return fresh_chromosome(code_length, rng)
    previous = np.asarray(previous, dtype=float)
    if previous.shape != (code_length, 2):
        raise ValueError(f"previous chromosome shape {previous.shape} does not "
                         f"match code length {code_length}")
    fresh = fresh_chromosome(code_length, rng)
    blend = w_p * previous + (1.0 - w_p) * fresh
    norms = np.linalg.norm(blend, axis=1)
    degenerate = norms < 1e-12  # exact cancellation; fall back to the fresh pair
    blend[degenerate] = fresh[degenerate]
    norms[degenerate] = 1.0
    return blend / norms[:, None]


def warm_start_weight(best_current: float, best_all: float,
                      worst_seen: float) -> float:
    """Blend weight from how close the latest best came to the all-time best.

    1 when best_current equals best_all, falling toward 0 as it
    approaches worst_seen; scaled by 0.5 and clamped to [0, 0.5]. A
    degenerate spread (best_all == worst_seen) counts as closeness 1.
    """
    if best_current >= best_all:
        return 0.5
    denom = best_all - worst_seen
    if denom <= 0:
        return 0.5
    ratio = (best_current - worst_seen) / denom
    return 0.5 * min(max(ratio, 0.0), 1.0)


@dataclass(frozen=True)
class BestRecord:
    """All-time best individual carried across iterations."""

    code: np.ndarray
    fitness: float


def memory_corrupt(record: BestRecord | None, probability: float, rng) -> BestRecord | None:
    """Discard the inherited best with the given probability (one draw always)."""
    if not 0.0 <= probability <= 1.0:
        raise ValueError(f"probability must be in [0,1], got {probability}")
    u = rng.random()
    if record is None:
        return None
    return None if u < probability else record


@dataclass(frozen=True)
class QgaConfig:
    population_size: int
    mutation_rate: float
    schedule: RotationSchedule
    stagnation_fraction: float = 0.5
    memory_corruption_prob: float = 0.1
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be >= 1")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError("mutation_rate must be in [0,1]")
        if not 0.0 < self.stagnation_fraction <= 1.0:
            raise ValueError("stagnation_fraction must be in (0,1]")
        if not 0.0 <= self.memory_corruption_prob <= 1.0:
            raise ValueError("memory_corruption_prob must be in [0,1]")


@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    alltime_best_fitness: float
    alltime_best_code: np.ndarray


@dataclass
class EvolveResult:
    best_code: np.ndarray
    best_fitness: float
    trace: list[GenerationRecord]
    final_chromosome: np.ndarray
    evaluations: int
    stagnated: bool


class EvolveError(RuntimeError):
    """Fitness evaluation failed; carries the trace built so far."""

    def __init__(self, message: str, trace: list[GenerationRecord]):
        super().__init__(message)
        self.trace = trace


def evolve(config: QgaConfig, fitness_fn, initial_chromosome: np.ndarray,
           rng=None, inherited_best: BestRecord | None = None) -> EvolveResult:
    """Run one QGA evolution and return the best individual found.

    Per generation: measure population_size individuals, evaluate their
    fitness, update the all-time best, then rotate every qubit by
    direction * rotation_angle comparing the generation's best
    measurement against the all-time best individual, and finally apply
    X-gate mutation. Stops at the schedule's max_generations or once
    the all-time best has gone ceil(stagnation_fraction *
    max_generations) consecutive generations without strict improvement.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    q = np.array(initial_chromosome, dtype=float)
    n = len(q)
    schedule = config.schedule
    stall_limit = math.ceil(config.stagnation_fraction * schedule.max_generations)

    best_code = None if inherited_best is None else inherited_best.code.copy()
    best_fitness = -math.inf if inherited_best is None else inherited_best.fitness
    trace: list[GenerationRecord] = []
    evaluations = 0
    stall = 0
    stagnated = False

    batch_eval = getattr(fitness_fn, "evaluate_many", None)

    for generation in range(schedule.max_generations):
        draws = rng.random((config.population_size, n))
        codes = (draws < q[:, 1] ** 2).astype(np.uint8)
        try:
            if batch_eval is not None:
                fitnesses = np.asarray(batch_eval(codes), dtype=float)
            else:
                fitnesses = np.asarray([fitness_fn(codes[i])
                                        for i in range(config.population_size)],
                                       dtype=float)
        except Exception as exc:
            raise EvolveError(f"fitness evaluation failed at generation "
                              f"{generation}: {exc}", trace) from exc
        evaluations += config.population_size

        gen_best = int(np.argmax(fitnesses))
        gen_best_fit = float(fitnesses[gen_best])
        gen_best_code = codes[gen_best]
        improved = best_code is None or gen_best_fit > best_fitness
        if improved:
            best_code = gen_best_code.copy()
            best_fitness = gen_best_fit
            stall = 0
        else:
            stall += 1

        exceeds = gen_best_fit > best_fitness  # ties count as not exceeding
        theta = rotation_angle(schedule, generation)
        for k in range(n):
            sign = rotation_direction(int(gen_best_code[k]), int(best_code[k]),
                                      exceeds, q[k, 0], q[k, 1], rng)
            if sign:
                q[k] = ry_apply(q[k], sign * theta)

        q = mutate(q, config.mutation_rate, rng)

        trace.append(GenerationRecord(generation, gen_best_fit,
                                      float(fitnesses.mean()),
                                      best_fitness, best_code.copy()))
        if stall >= stall_limit and generation + 1 < schedule.max_generations:
            stagnated = True  # cut short; hitting the limit on the final
            break             # generation is ordinary completion

    return EvolveResult(best_code, best_fitness, trace, q, evaluations, stagnated)


TRACE_HEADER = ["generation", "best_fitness", "mean_fitness",
                "alltime_best_fitness", "alltime_best_code"]


def write_trace_csv(trace: list[GenerationRecord], path) -> None:
    from .encoding import code_to_string

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_HEADER)
        for rec in trace:
            writer.writerow([rec.generation, repr(rec.best_fitness),
                             repr(rec.mean_fitness), repr(rec.alltime_best_fitness),
                             code_to_string(rec.alltime_best_code)])
