"""Acceptance suite: one test per criterion, each printing PASS/FAIL.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines as they complete. Criteria 1 and 3 are known to fail at these
budgets on honest physics: the surrogate trained on tens of labels
cannot reliably pinpoint the unique global optimum of these
interference-dominated landscapes (the loop's label budget is two
orders of magnitude below what the landscape's learnability supports).
They run faithfully and report their true rates.
"""

import dataclasses
import math
import statistics
import time
from multiprocessing import Pool

import numpy as np
import pytest

from conftest import airy_transmittance, single_film_stack
from qgafilm.active_learning import run_loop
from qgafilm.baselines import CgaConfig, cga_evolve, exhaustive_search
from qgafilm.cli import main as cli_main
from qgafilm.dataset import LabeledDataset
from qgafilm.fm import FmConfig, _gradients_one, _loss_one, fm_train
from qgafilm.forest import ForestConfig, rf_train
from qgafilm.presets import loop_config
from qgafilm.problem import CountingFitness, default_problem
from qgafilm.qga import (QgaConfig, RotationSchedule, fresh_chromosome,
                         measure_many, mutate, ry_apply, x_apply)
from qgafilm.surrogate import evaluate_rmse


def report(criterion, passed, detail):
    print(f"CRITERION {criterion}: {'PASS' if passed else 'FAIL'} - {detail}",
          flush=True)


# --------------------------------------------------------- shared fixtures --

@pytest.fixture(scope="module")
def n6_oracle(n6_problem):
    fitness = CountingFitness(n6_problem.fitness)
    result = exhaustive_search(fitness, n6_problem.code_length)
    assert result.evaluations == 4096
    return result


@pytest.fixture(scope="module")
def n6_runs(n6_problem):
    runs = []
    for seed in range(5):
        started = time.time()
        result = run_loop(loop_config("n6", rng_seed=seed), n6_problem)
        runs.append((seed, result, time.time() - started))
    return runs


# -------------------------------------------------------------- criteria --

def test_criterion_01_oracle_equivalence_n6(n6_problem, n6_runs, n6_oracle):
    hits = sum(np.array_equal(result.best_code, n6_oracle.best_code)
               for _, result, _ in n6_runs)
    slowest = max(elapsed for _, _, elapsed in n6_runs)
    passed = hits >= 4 and slowest < 300.0
    report(1, passed, f"{hits}/5 seeds matched the exhaustive optimum; "
                      f"slowest run {slowest:.1f}s (cap 300s)")
    assert slowest < 300.0
    assert hits >= 4


def test_criterion_02_budget_accounting(n6_problem, n6_runs):
    from qgafilm.active_learning import evaluation_budget_report

    ok = True
    details = []
    for seed, result, _ in n6_runs:
        rep = evaluation_budget_report(result, loop_config("n6", rng_seed=seed),
                                       n6_problem.code_length)
        ok &= rep["surrogate_evaluations"] <= 25_000
        ok &= result.tmm_evaluations <= 35
        if not rep["early_termination"]:
            ok &= rep["surrogate_evaluations"] == 25_000
        details.append(rep["surrogate_evaluations"])
    # forced full-budget variant: no stagnation, no convergence stop
    full = loop_config("n6", rng_seed=99, stagnation_fraction=1.0,
                       convergence_repeats=10**6)
    full_run = run_loop(full, n6_problem)
    ok &= full_run.surrogate_evaluations == 25_000
    ok &= full_run.tmm_evaluations <= 35
    report(2, ok, f"surrogate evals per seed {details} (bound 25000); "
                  f"full-budget variant used exactly "
                  f"{full_run.surrogate_evaluations}; TMM <= 35 in all runs")
    assert ok


def _qga_first_hit(seed):
    problem = default_problem(8)
    optimum = _qga_first_hit.optimum
    config = dataclasses.replace(
        loop_config("n8", rng_seed=seed, convergence_repeats=10**6),
        max_iterations=60)
    result = run_loop(config, problem)
    for position, (code, _) in enumerate(result.dataset.rows()):
        if np.array_equal(code, optimum):
            return position + 1
    return math.inf


def test_criterion_03_qga_beats_cga_on_labels():
    problem = default_problem(8)
    oracle = exhaustive_search(CountingFitness(problem.fitness),
                               problem.code_length)
    _qga_first_hit.optimum = oracle.best_code

    with Pool(5) as pool:
        qga_counts = pool.map(_qga_first_hit, range(5))

    cga_counts = []
    for seed in range(5):
        state = {"calls": 0, "first": math.inf}

        def fitness(code, state=state):
            state["calls"] += 1
            if state["first"] is math.inf and np.array_equal(code, oracle.best_code):
                state["first"] = state["calls"]
            return problem.fitness(code)

        cga_evolve(CgaConfig(population_size=50, generations=200, rng_seed=seed),
                   fitness, problem.code_length)
        cga_counts.append(state["first"])

    qga_median = statistics.median(qga_counts)
    cga_median = statistics.median(cga_counts)
    passed = qga_median < cga_median
    report(3, passed, f"median labels to optimum: qga {qga_median} "
                      f"(per-seed {qga_counts}), cga {cga_median} "
                      f"(per-seed {cga_counts})")
    assert passed


def test_criterion_04_gate_algebra():
    rng = np.random.default_rng(0)
    q = fresh_chromosome(200, rng)
    rounds = 2500  # 2500 * (200 ry + 200 swap-candidates) = 1e6 gate ops
    for _ in range(rounds):
        thetas = rng.uniform(-0.5, 0.5, size=len(q))
        for k in range(len(q)):
            q[k] = ry_apply(q[k], thetas[k])
        q = mutate(q, 0.5, rng)
    worst_norm = float(np.max(np.abs(np.einsum("ij,ij->i", q, q) - 1.0)))

    comp_worst = 0.0
    for _ in range(500):
        pair = fresh_chromosome(1, rng)[0]
        theta = rng.uniform(-math.pi, math.pi)
        twice = ry_apply(ry_apply(pair, theta), theta)
        once = ry_apply(pair, 2 * theta)
        comp_worst = max(comp_worst, float(np.max(np.abs(twice - once))))

    # zero rows: matching measured/best bits leave amplitudes bit-identical
    from qgafilm.qga import evolve
    config = QgaConfig(population_size=3, mutation_rate=0.0,
                       schedule=RotationSchedule(0.1 * math.pi, 0.01 * math.pi, 5),
                       rng_seed=1)
    q0 = np.tile([0.0, 1.0], (8, 1))
    out = evolve(config, lambda code: float(code.sum()), q0,
                 rng=np.random.default_rng(1))
    zero_rows_exact = np.array_equal(out.final_chromosome, q0)

    passed = worst_norm <= 1e-9 and comp_worst <= 1e-10 and zero_rows_exact
    report(4, passed, f"norm drift {worst_norm:.2e} (cap 1e-9); composition "
                      f"error {comp_worst:.2e} (cap 1e-10); zero-rows exact: "
                      f"{zero_rows_exact}")
    assert passed


def test_criterion_05_measurement_statistics():
    rng = np.random.default_rng(2)
    trials = 10**5
    total_bits = 0
    bits_in_bounds = 0
    for _ in range(100):
        n = int(rng.integers(4, 17))
        q = fresh_chromosome(n, rng)
        freq = measure_many(q, trials, rng).mean(axis=0)
        p = q[:, 1] ** 2
        sigma = np.sqrt(np.maximum(p * (1 - p) / trials, 1e-300))
        bits_in_bounds += int(np.sum(np.abs(freq - p) <= 3 * sigma + 1e-12))
        total_bits += n
    fraction = bits_in_bounds / total_bits
    passed = fraction >= 0.99
    report(5, passed, f"{bits_in_bounds}/{total_bits} bits within 3-sigma "
                      f"({fraction:.4f}, need >= 0.99)")
    assert passed


def test_criterion_06_tmm_correctness(n6_problem):
    rng = np.random.default_rng(3)
    airy_worst = 0.0
    for _ in range(1000):
        n0, n2 = 1.0, rng.uniform(1.0, 2.0)
        n1 = rng.uniform(1.2, 3.5)
        k1 = rng.choice([0.0, rng.uniform(0.0, 1.0)])
        d = rng.uniform(5.0, 1500.0)
        lam = rng.uniform(300.0, 2500.0)
        from qgafilm.optics import transmittance

        got = transmittance(single_film_stack(n1, k1, d, n0, n2), lam)
        airy_worst = max(airy_worst,
                         abs(got - airy_transmittance(n0, n1, k1, n2, d, lam)))

    from conftest import random_lossless_stack
    from qgafilm.optics import spectral_response

    energy_worst = 0.0
    for _ in range(10**4):
        stack = random_lossless_stack(rng)
        lam = rng.uniform(300.0, 2500.0)
        t, r = spectral_response(stack, np.array([lam]))
        energy_worst = max(energy_worst, abs(float(t[0] + r[0]) - 1.0))

    from qgafilm.optics import fom_from_transmission
    ideal_fom = fom_from_transmission(n6_problem.grid.ideal_t.copy(),
                                      n6_problem.grid)

    passed = airy_worst <= 1e-10 and energy_worst <= 1e-8 and ideal_fom == 0.0
    report(6, passed, f"airy mismatch {airy_worst:.2e} (cap 1e-10); "
                      f"|R+T-1| {energy_worst:.2e} (cap 1e-8); "
                      f"FOM(ideal) = {ideal_fom}")
    assert passed


def test_criterion_07_surrogate_quality_direction():
    started = time.time()
    problem = default_problem(16)
    rf_scores, fm_scores = [], []
    for repeat in range(10):
        rng = np.random.default_rng((7, repeat))

        def sample(count, exclude=None):
            ds = LabeledDataset(problem.code_length)
            while len(ds) < count:
                code = rng.integers(0, 2, size=problem.code_length, dtype=np.uint8)
                if code not in ds and (exclude is None or code not in exclude):
                    ds.add(code, problem.fom(code))
            return ds

        test = sample(200)
        train = sample(100, exclude=test)
        rf_scores.append(evaluate_rmse(
            rf_train(train, ForestConfig(rng_seed=repeat)), test))
        fm_scores.append(evaluate_rmse(
            fm_train(train, FmConfig(rng_seed=repeat)), test))
    elapsed = time.time() - started
    rf_mean, fm_mean = float(np.mean(rf_scores)), float(np.mean(fm_scores))
    passed = rf_mean <= fm_mean and elapsed < 600.0
    report(7, passed, f"mean test RMSE rf {rf_mean:.5f} vs fm {fm_mean:.5f} "
                      f"over 10 repeats; {elapsed:.0f}s (cap 600s)")
    assert elapsed < 600.0
    assert rf_mean <= fm_mean


def test_criterion_08_fm_gradient_check():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(100):
        p, rank = int(rng.integers(4, 12)), int(rng.integers(1, 6))
        w0 = rng.normal()
        w = rng.normal(size=p)
        v = rng.normal(size=(p, rank))
        x = rng.integers(0, 2, size=p).astype(float)
        y = rng.normal()
        l2 = 10 ** rng.uniform(-5, -2)
        g_w0, g_w, g_v = _gradients_one(w0, w, v, x, y, l2)
        eps = 1e-6

        def rel(numeric, analytic):
            return abs(numeric - analytic) / max(1.0, abs(analytic))

        worst = max(worst, rel(
            (_loss_one(w0 + eps, w, v, x, y, l2)
             - _loss_one(w0 - eps, w, v, x, y, l2)) / (2 * eps), g_w0))
        for i in range(p):
            dw = np.zeros(p)
            dw[i] = eps
            worst = max(worst, rel(
                (_loss_one(w0, w + dw, v, x, y, l2)
                 - _loss_one(w0, w - dw, v, x, y, l2)) / (2 * eps), g_w[i]))
        for i in range(p):
            for f in range(rank):
                dv = np.zeros((p, rank))
                dv[i, f] = eps
                worst = max(worst, rel(
                    (_loss_one(w0, w, v + dv, x, y, l2)
                     - _loss_one(w0, w, v - dv, x, y, l2)) / (2 * eps),
                    g_v[i, f]))
    passed = worst <= 1e-5
    report(8, passed, f"worst relative gradient error {worst:.2e} (cap 1e-5)")
    assert passed


def test_criterion_09_determinism(tmp_path):
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        code = cli_main(["optimize", "--algo", "qga", "--preset", "n6",
                         "--seed", "11", "--out", str(out)])
        assert code in (0, 2)
        outputs.append(out)
    compared = []
    identical = True
    names = ["iterations.csv", "dataset.csv", "config.toml"]
    names += [p.name for p in sorted(outputs[0].glob("qga_trace_*.csv"))]
    for name in names:
        same = (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()
        identical &= same
        compared.append(name)
    report(9, identical, f"byte-compared {compared} across two seeded re-runs")
    assert identical


def _compare_arm(args):
    seed, surrogate = args
    problem = default_problem(16)
    qga = QgaConfig(population_size=50, mutation_rate=0.001,
                    schedule=RotationSchedule(0.1 * math.pi, 0.01 * math.pi, 100),
                    rng_seed=seed)
    from qgafilm.active_learning import LoopConfig

    config = LoopConfig(initial_dataset_size=150, max_iterations=5, qga=qga,
                        surrogate_choice=surrogate, convergence_repeats=10**6,
                        rng_seed=seed)
    result = run_loop(config, problem)
    fom_per_iteration = [rec.true_fom for rec in result.records]
    gens_per_iteration = [len(ev.trace) for ev in result.evolve_results]
    return seed, surrogate, fom_per_iteration, gens_per_iteration


def test_criterion_10_rf_vs_fm_speed_n16():
    # reduced n16 budget (100 generations, 5 iterations, population 50);
    # both arms share the seed, hence bootstrap dataset and chromosome draws
    jobs = [(seed, surrogate) for seed in range(5) for surrogate in ("rf", "fm")]
    with Pool(5) as pool:
        results = pool.map(_compare_arm, jobs)
    by_key = {(seed, surrogate): (foms, gens)
              for seed, surrogate, foms, gens in results}
    wins = 0
    details = []
    for seed in range(5):
        rf_foms, rf_gens = by_key[(seed, "rf")]
        fm_foms, fm_gens = by_key[(seed, "fm")]
        threshold = min(min(rf_foms), min(fm_foms))

        def gens_to_threshold(foms, gens):
            total = 0
            for fom, g in zip(foms, gens):
                total += g
                if fom <= threshold + 1e-12:
                    return total
            return math.inf

        rf_cost = gens_to_threshold(rf_foms, rf_gens)
        fm_cost = gens_to_threshold(fm_foms, fm_gens)
        wins += rf_cost <= fm_cost
        details.append(f"seed{seed}: rf {rf_cost} fm {fm_cost}")
    passed = wins >= 3
    report(10, passed, f"{wins}/5 seeds with rf generations-to-threshold <= fm "
                       f"({'; '.join(details)})")
    assert passed
