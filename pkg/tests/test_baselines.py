import numpy as np
import pytest

from conftest import onemax
from qgafilm.baselines import CgaConfig, cga_evolve, exhaustive_search
from qgafilm.problem import CountingFitness


class TestExhaustiveSearch:
    def test_onemax_known_optimum(self):
        result = exhaustive_search(onemax, 4)
        assert result.best_code.tolist() == [1, 1, 1, 1]
        assert result.best_fitness == 4.0
        assert result.evaluations == 16
        assert result.tie_count == 1

    def test_evaluation_count_is_full_space(self):
        fitness = CountingFitness(onemax)
        result = exhaustive_search(fitness, 12)
        assert result.evaluations == 4096
        assert fitness.calls == 4096

    def test_beats_random_sampling(self):
        rng = np.random.default_rng(0)

        def fitness(code):
            v = int("".join(map(str, code)), 2)
            return float(np.sin(v * 0.7) + np.cos(v * 0.13))

        result = exhaustive_search(fitness, 10)
        samples = rng.integers(0, 2, size=(1000, 10), dtype=np.uint8)
        assert all(result.best_fitness >= fitness(s) for s in samples)

    def test_cap_refusal_mentions_alternative(self):
        with pytest.raises(ValueError, match="heuristic"):
            exhaustive_search(onemax, 21)

    def test_tie_breaking_lowest_code(self):
        result = exhaustive_search(lambda code: 0.0, 4)
        assert result.best_code.tolist() == [0, 0, 0, 0]
        assert result.tie_count == 16


def _cga(pop=50, gens=200, seed=0, **kw):
    return CgaConfig(population_size=pop, generations=gens, rng_seed=seed, **kw)


class TestCga:
    def test_onemax_16_bits(self):
        wins = 0
        for seed in range(100):
            result = cga_evolve(_cga(seed=seed), onemax, 16)
            wins += result.best_fitness == 16.0
        assert wins >= 90

    def test_no_variation_population_static(self):
        config = _cga(pop=10, gens=5, crossover_rate=0.0, mutation_rate=0.0,
                      elitism_count=10)
        traces = cga_evolve(config, onemax, 8).trace
        assert all(rec.best_fitness == traces[1].best_fitness for rec in traces[1:])
        assert all(rec.mean_fitness == traces[1].mean_fitness for rec in traces[1:])

    def test_elitism_monotone_best(self):
        result = cga_evolve(_cga(pop=20, gens=50, seed=3), onemax, 12)
        bests = [rec.alltime_best_fitness for rec in result.trace]
        assert all(a <= b for a, b in zip(bests, bests[1:]))
        gen_bests = [rec.best_fitness for rec in result.trace]
        assert all(a <= b for a, b in zip(gen_bests, gen_bests[1:]))

    def test_deterministic_given_seed(self):
        a = cga_evolve(_cga(seed=9, gens=30), onemax, 10)
        b = cga_evolve(_cga(seed=9, gens=30), onemax, 10)
        for ra, rb in zip(a.trace, b.trace):
            assert ra.best_fitness == rb.best_fitness
            assert ra.mean_fitness == rb.mean_fitness

    def test_evaluation_accounting(self):
        fitness = CountingFitness(onemax)
        result = cga_evolve(_cga(pop=10, gens=20), fitness, 8)
        assert fitness.calls == 10 * 21  # initial population + 20 generations
        assert result.evaluations == fitness.calls

    def test_default_mutation_rate_is_one_over_length(self):
        # smoke check: runs and still solves OneMax with the default rate
        result = cga_evolve(_cga(pop=30, gens=100, seed=1), onemax, 8)
        assert result.best_fitness == 8.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CgaConfig(population_size=1, generations=10)
        with pytest.raises(ValueError):
            CgaConfig(population_size=10, generations=10, elitism_count=11)
        with pytest.raises(ValueError):
            CgaConfig(population_size=10, generations=10, crossover_rate=1.5)

    def test_trace_schema_matches_qga(self):
        from qgafilm.qga import GenerationRecord

        result = cga_evolve(_cga(pop=10, gens=5), onemax, 6)
        assert all(isinstance(rec, GenerationRecord) for rec in result.trace)
        assert len(result.trace) == 6

    def test_film_problem_beats_random_sampling_floor(self):
        from qgafilm.problem import default_problem

        problem = default_problem(8)
        result = cga_evolve(_cga(pop=50, gens=200, seed=0), problem.fitness,
                            problem.code_length)
        rng = np.random.default_rng(1)
        floor = max(problem.fitness(rng.integers(0, 2, size=16, dtype=np.uint8))
                    for _ in range(10**4))
        assert result.best_fitness >= floor
