#!/usr/bin/env python3
"""Benchmark the active-learning QGA against exhaustive search at N=6.

Runs the exhaustive oracle once, then the surrogate loop over several
seeds, and prints label budgets and hit/miss per seed. Writes run
directories under runs/n6_benchmark/.
"""

import argparse
import sys

import numpy as np

from qgafilm.active_learning import run_loop
from qgafilm.baselines import exhaustive_search
from qgafilm.cli import main as cli_main
from qgafilm.encoding import code_to_string
from qgafilm.presets import loop_config
from qgafilm.problem import CountingFitness, default_problem


def run(seeds):
    problem = default_problem(6)
    oracle = exhaustive_search(CountingFitness(problem.fitness), problem.code_length)
    print(f"exhaustive: {code_to_string(oracle.best_code)} "
          f"fom {-oracle.best_fitness / 100:.6f} ({oracle.evaluations} evaluations)")
    hits = 0
    for seed in seeds:
        result = run_loop(loop_config("n6", rng_seed=seed), problem)
        hit = np.array_equal(result.best_code, oracle.best_code)
        hits += hit
        print(f"seed {seed}: {code_to_string(result.best_code)} "
              f"fom {result.best_true_fom:.6f} [{result.status}] "
              f"tmm={result.tmm_evaluations} "
              f"surrogate={result.surrogate_evaluations} "
              f"{'HIT' if hit else 'miss'}")
        cli_main(["optimize", "--algo", "qga", "--preset", "n6",
                  "--seed", str(seed), "--out", f"runs/n6_benchmark/seed{seed}"])
    print(f"hits: {hits}/{len(seeds)}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--seeds", type=int, default=5)
    args = parser.parse_args()
    sys.exit(run(range(args.seeds)))
