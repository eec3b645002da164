"""Active-learning loop: surrogate training, QGA search, true labeling.

Each iteration trains a fresh surrogate on the labeled dataset, runs the
quantum-inspired GA against the surrogate's fitness, labels the proposed
optimum with the true transfer-matrix figure of merit, and appends it to
the dataset (or a random unseen structure when the proposal is already
labeled). The loop stops when the proposal repeats `convergence_repeats`
times in a row, or after `max_iterations`.

Seed discipline: a master SeedSequence spawns one child for loop-level
draws (bootstrap sampling, memory-corruption coin, duplicate
substitution), one child per iteration for that iteration's chromosome
init + QGA run, and one child stream for per-iteration surrogate seeds.
Identical config + seed therefore reproduces every record bit for bit.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .dataset import LabeledDataset
from .fm import FmConfig
from .forest import ForestConfig
from .problem import FITNESS_SCALE, CountingFitness, SurrogateFitness, TrcProblem
from .qga import (BestRecord, EvolveError, EvolveResult, QgaConfig,
                  memory_corrupt, warm_start, warm_start_weight)
from . import qga

STATUS_CONVERGED = "converged"
STATUS_BUDGET_EXHAUSTED = "budget-exhausted"
STATUS_ABORTED = "aborted"


@dataclass(frozen=True)
class LoopConfig:
    initial_dataset_size: int
    max_iterations: int
    qga: QgaConfig
    surrogate_choice: str = "rf"
    rf: ForestConfig = field(default_factory=ForestConfig)
    fm: FmConfig = field(default_factory=FmConfig)
    convergence_repeats: int = 3
    inherit_best_record: bool = True  # carry the rotation target across iterations
    rng_seed: int = 0

    def __post_init__(self):
        if self.initial_dataset_size < 2:
            raise ValueError("initial_dataset_size must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.surrogate_choice not in ("rf", "fm"):
            raise ValueError(f"unknown surrogate {self.surrogate_choice!r}")
        if self.convergence_repeats < 1:
            raise ValueError("convergence_repeats must be >= 1")


@dataclass
class IterationRecord:
    iteration: int
    proposed_code: np.ndarray
    predicted_fom: float
    true_fom: float
    dataset_size: int
    duplicate: bool
    tmm_evaluations: int


@dataclass
class LoopResult:
    best_code: np.ndarray
    best_true_fom: float
    records: list[IterationRecord]
    evolve_results: list[EvolveResult]
    dataset: LabeledDataset
    status: str
    tmm_evaluations: int
    surrogate_evaluations: int
    error: str | None = None


def _random_unseen_code(code_length: int, exclude, rng) -> np.ndarray:
    if len(exclude) >= 2**code_length:
        raise RuntimeError("search space exhausted; nothing left to sample")
    while True:
        code = rng.integers(0, 2, size=code_length, dtype=np.uint8)
        if code not in exclude:
            return code


def bootstrap_dataset(config: LoopConfig, problem: TrcProblem, rng,
                      labeler=None) -> LabeledDataset:
    """m distinct uniformly random codes labeled with the true FOM."""
    m = config.initial_dataset_size
    space = 2**problem.code_length
    if m > space:
        raise ValueError(f"initial dataset size {m} exceeds the {space} possible codes")
    if labeler is None:
        labeler = problem.fom
    dataset = LabeledDataset(problem.code_length)
    while len(dataset) < m:
        code = rng.integers(0, 2, size=problem.code_length, dtype=np.uint8)
        if code not in dataset:
            dataset.add(code, labeler(code))
    return dataset


def run_loop(config: LoopConfig, problem: TrcProblem) -> LoopResult:
    master = np.random.SeedSequence(config.rng_seed)
    children = master.spawn(2 + config.max_iterations)
    loop_rng = np.random.default_rng(children[0])
    surrogate_seeds = [int(s.generate_state(1)[0]) for s in
                       children[1].spawn(config.max_iterations)]

    tmm = CountingFitness(problem.fom)
    dataset = bootstrap_dataset(config, problem, loop_rng, tmm)

    records: list[IterationRecord] = []
    evolve_results: list[EvolveResult] = []
    surrogate_evaluations = 0
    record_best: BestRecord | None = None
    prev_chromosome = None
    iteration_bests: list[float] = []
    last_proposal = None
    streak = 0
    status = STATUS_BUDGET_EXHAUSTED
    error = None

    for iteration in range(config.max_iterations):
        if iteration > 0:
            record_best = memory_corrupt(record_best,
                                         config.qga.memory_corruption_prob, loop_rng)
        try:
            model = _train(config, dataset, surrogate_seeds[iteration])
        except Exception as exc:
            status = STATUS_ABORTED
            error = f"surrogate training failed at iteration {iteration}: {exc}"
            break

        iter_rng = np.random.default_rng(children[2 + iteration])
        if iteration == 0 or record_best is None:
            # first cycle, or the inherited optimum was just corrupted away
            chromosome = warm_start(None, 0.0, problem.code_length, iter_rng)
        else:
            # closeness of the last proposal to the best proposal so far,
            # on the true-fitness scale (stable across surrogate retrains)
            w_p = warm_start_weight(iteration_bests[-1], max(iteration_bests),
                                    min(iteration_bests))
            chromosome = warm_start(prev_chromosome, w_p, problem.code_length, iter_rng)

        if record_best is not None:
            # re-value the inherited code under this iteration's surrogate;
            # a fitness from the previous model's scale would be incomparable
            # with the new measurements. Bookkeeping query, not a measurement,
            # so it stays outside the generations x iterations x population
            # evaluation budget.
            record_best = BestRecord(record_best.code,
                                     FITNESS_SCALE * float(model.predict(record_best.code)))

        fitness = SurrogateFitness(model)
        try:
            result = qga.evolve(config.qga, fitness, chromosome, rng=iter_rng,
                                inherited_best=record_best
                                if config.inherit_best_record else None)
        except EvolveError as exc:
            status = STATUS_ABORTED
            error = str(exc)
            surrogate_evaluations += fitness.calls
            break
        surrogate_evaluations += fitness.calls
        evolve_results.append(result)
        record_best = BestRecord(result.best_code.copy(), result.best_fitness)
        prev_chromosome = result.final_chromosome

        proposal = result.best_code
        predicted_fom = result.best_fitness / FITNESS_SCALE
        if proposal in dataset:
            duplicate = True
            true_fom = dataset.label_of(proposal)
            substitute = _random_unseen_code(problem.code_length, dataset, loop_rng)
            dataset.add(substitute, tmm(substitute))
        else:
            duplicate = False
            true_fom = tmm(proposal)
            dataset.add(proposal, true_fom)
        iteration_bests.append(FITNESS_SCALE * true_fom)
        records.append(IterationRecord(iteration, proposal.copy(), predicted_fom,
                                       true_fom, len(dataset), duplicate, tmm.calls))

        if last_proposal is not None and np.array_equal(proposal, last_proposal):
            streak += 1
        else:
            streak = 1
        last_proposal = proposal
        if streak >= config.convergence_repeats:
            status = STATUS_CONVERGED
            break

    best_code, best_fom = dataset.best()
    return LoopResult(best_code, best_fom, records, evolve_results, dataset,
                      status, tmm.calls, surrogate_evaluations, error)


def _train(config: LoopConfig, dataset: LabeledDataset, seed: int):
    from .surrogate import train_surrogate

    if config.surrogate_choice == "rf":
        return train_surrogate("rf", dataset,
                               rf_config=dataclasses.replace(config.rf, rng_seed=seed))
    return train_surrogate("fm", dataset,
                           fm_config=dataclasses.replace(config.fm, rng_seed=seed))


def surrogate_evaluation_bound(config: LoopConfig) -> int:
    """Closed-form evaluation budget: generations x iterations x population."""
    return (config.qga.schedule.max_generations * config.max_iterations
            * config.qga.population_size)


def evaluation_budget_report(result: LoopResult, config: LoopConfig,
                             code_length: int) -> dict:
    """Evaluation accounting for cost comparisons against enumeration."""
    early = (result.status == STATUS_CONVERGED
             or len(result.evolve_results) < config.max_iterations
             or any(r.stagnated for r in result.evolve_results))
    return {
        "tmm_evaluations": result.tmm_evaluations,
        "surrogate_evaluations": result.surrogate_evaluations,
        "surrogate_evaluation_bound": surrogate_evaluation_bound(config),
        "exhaustive_equivalent": 2**code_length,
        "early_termination": early,
    }
