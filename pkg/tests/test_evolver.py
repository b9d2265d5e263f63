import numpy as np
import pytest

from edm_rulex.errors import NumericError, ValidationError
from edm_rulex.evolver import (
    EvolutionResult,
    GaConfig,
    crossover_point,
    evolve,
    mutate_bits,
    select_tournament,
)


def popcount(bits):
    return float(np.sum(bits))


def test_onemax_reaches_all_ones():
    for seed in range(20):
        result = evolve(popcount, 16, GaConfig(seed=seed))
        assert result.best_fitness == 16.0
        assert result.best_chromosome.sum() == 16


def test_constant_fitness_terminates():
    result = evolve(lambda bits: 1.0, 8, GaConfig(population_size=10, generations=15, seed=0))
    assert result.best_fitness == 1.0
    assert result.history == [1.0] * 15
    assert result.generations == 15


def test_history_non_decreasing():
    def lumpy(bits):  # pure but deliberately rugged
        x = int("".join(map(str, bits.tolist())), 2)
        return float((x * 2654435761) % 997)

    result = evolve(lumpy, 14, GaConfig(population_size=30, generations=40, seed=3))
    assert all(a <= b for a, b in zip(result.history, result.history[1:]))


def test_deterministic():
    cfg = GaConfig(population_size=20, generations=25, seed=1234)
    a = evolve(popcount, 12, cfg)
    b = evolve(popcount, 12, cfg)
    assert a.best_fitness == b.best_fitness
    assert np.array_equal(a.best_chromosome, b.best_chromosome)
    assert a.history == b.history


def test_non_finite_fitness_aborts():
    def bad(bits):
        return float("nan") if bits[0] else 0.0

    with pytest.raises(NumericError, match="chromosome"):
        evolve(bad, 4, GaConfig(population_size=8, generations=5, seed=0))


def test_soundness_against_enumeration():
    rng = np.random.default_rng(99)
    weights = rng.normal(size=12)

    def fitness(bits):
        return float(np.asarray(bits) @ weights)

    exhaustive = max(
        fitness((i >> np.arange(12)) & 1) for i in range(2**12)
    )
    for seed in range(5):
        result = evolve(fitness, 12, GaConfig(population_size=40, generations=40, seed=seed))
        assert result.best_fitness <= exhaustive + 1e-12


def test_tournament_prefers_best():
    rng = np.random.default_rng(0)
    population = [np.array([i], dtype=np.uint8) for i in range(4)]
    fitnesses = [0.1, 0.9, 0.4, 0.2]
    wins = sum(
        select_tournament(population, fitnesses, 64, rng)[0] == 1 for _ in range(10**4)
    )
    # P(best in 64 draws with replacement) = 1 - (3/4)^64 ~ 1 - 1e-8
    assert wins >= 9900


def test_tournament_single_member():
    rng = np.random.default_rng(0)
    only = np.array([1, 0], dtype=np.uint8)
    assert select_tournament([only], [0.5], 3, rng) is only


def test_tournament_tie_lowest_index():
    # with equal fitnesses the winner is the lowest drawn index
    population = [np.array([i], dtype=np.uint8) for i in range(5)]
    for seed in range(50):
        draws = np.random.default_rng(seed).integers(0, 5, size=7)
        winner = select_tournament(
            population, [1.0] * 5, 7, np.random.default_rng(seed)
        )
        assert winner[0] == draws.min()


def test_crossover_examples():
    a = np.array([1, 1, 1, 1], dtype=np.uint8)
    b = np.array([0, 0, 0, 0], dtype=np.uint8)
    c1, c2 = crossover_point(a, b, 2)
    assert c1.tolist() == [1, 1, 0, 0]
    assert c2.tolist() == [0, 0, 1, 1]
    c1, c2 = crossover_point(a, a, 1)
    assert np.array_equal(c1, a) and np.array_equal(c2, a)
    with pytest.raises(ValidationError):
        crossover_point(a, b, 0)
    with pytest.raises(ValidationError):
        crossover_point(a, b, 4)
    with pytest.raises(ValidationError):
        crossover_point(a, b[:3], 1)


def test_crossover_conserves_bits():
    rng = np.random.default_rng(4)
    for _ in range(10**4):
        length = int(rng.integers(2, 20))
        a = rng.integers(0, 2, length, dtype=np.uint8)
        b = rng.integers(0, 2, length, dtype=np.uint8)
        cut = int(rng.integers(1, length))
        c1, c2 = crossover_point(a, b, cut)
        assert np.array_equal(c1 + c2, a + b)


def test_mutate_edges():
    rng = np.random.default_rng(0)
    c = rng.integers(0, 2, 64, dtype=np.uint8)
    assert np.array_equal(mutate_bits(c, 0.0, rng), c)
    assert np.array_equal(mutate_bits(c, 1.0, rng), 1 - c)


def test_mutate_flip_rate():
    rng = np.random.default_rng(8)
    c = np.zeros(1000, dtype=np.uint8)
    flips = [mutate_bits(c, 0.02, rng).sum() for _ in range(1000)]
    assert 15 <= np.mean(flips) <= 25


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(population_size=1),
        dict(elitism=100, population_size=100),
        dict(crossover_prob=1.5),
        dict(mutation_prob=-0.1),
        dict(tournament_size=0),
        dict(generations=-1),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValidationError):
        GaConfig(**kwargs)


def test_zero_generations_returns_initial_best():
    result = evolve(popcount, 6, GaConfig(population_size=12, generations=0, seed=2))
    assert isinstance(result, EvolutionResult)
    assert result.history == []
    assert result.best_fitness == popcount(result.best_chromosome)
