"""Genetic search over fixed-length binary chromosomes.

Maximizes an arbitrary pure fitness function with tournament selection,
single-point crossover, per-bit mutation, and elitism.  Chromosomes are
unconstrained bit strings; segments may be multi-hot or empty, the decoder
gives them meaning.  Runs are deterministic for a fixed seed, and because
fitness must be pure, evaluation order never affects the result.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NumericError, ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    generations: int = 200
    crossover_prob: float = 0.8
    mutation_prob: float = 0.02  # per bit
    tournament_size: int = 3
    elitism: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValidationError(f"population must be >= 2, got {self.population_size}")
        if not 0 <= self.elitism < self.population_size:
            raise ValidationError(
                f"elitism must be in [0, population), got {self.elitism}"
            )
        for name in ("crossover_prob", "mutation_prob"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValidationError(f"{name} must be in [0,1], got {p}")
        if self.tournament_size < 1:
            raise ValidationError(f"tournament size must be >= 1, got {self.tournament_size}")
        if self.generations < 0:
            raise ValidationError(f"generations must be >= 0, got {self.generations}")


@dataclass
class EvolutionResult:
    best_chromosome: np.ndarray
    best_fitness: float
    history: list[float]  # running best per generation; non-decreasing
    generations: int


def select_tournament(
    population: Sequence[np.ndarray] | np.ndarray,
    fitnesses: Sequence[float] | np.ndarray,
    k: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Best of k uniform draws with replacement; ties go to the lowest index."""
    if len(population) == 0:
        raise ValidationError("cannot select from an empty population")
    if k < 1:
        raise ValidationError(f"tournament size must be >= 1, got {k}")
    fits = np.asarray(fitnesses, dtype=float)
    draws = rng.integers(0, len(population), size=k)
    best = draws[fits[draws] == fits[draws].max()].min()
    return population[int(best)]


def crossover_point(a: np.ndarray, b: np.ndarray, cut: int) -> tuple[np.ndarray, np.ndarray]:
    """Swap suffixes at the cut; bit multiset per position is preserved."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValidationError(f"parents differ in length: {a.shape} vs {b.shape}")
    if not 1 <= cut < a.shape[0]:
        raise ValidationError(f"cut must be in [1, {a.shape[0]}), got {cut}")
    return (
        np.concatenate([a[:cut], b[cut:]]),
        np.concatenate([b[:cut], a[cut:]]),
    )


def mutate_bits(c: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability p."""
    if not 0 <= p <= 1:
        raise ValidationError(f"mutation probability must be in [0,1], got {p}")
    c = np.asarray(c, dtype=np.uint8)
    if p >= 1.0:
        return 1 - c
    flips = rng.random(c.shape[0]) < p
    return np.where(flips, 1 - c, c).astype(np.uint8)


def _evaluate(fitness, population: np.ndarray) -> np.ndarray:
    fits = np.empty(population.shape[0])
    for i, chrom in enumerate(population):
        value = float(fitness(chrom))
        if not math.isfinite(value):
            raise NumericError(
                f"fitness returned non-finite value {value!r} "
                f"for chromosome {chrom.tolist()}"
            )
        fits[i] = value
    return fits


def evolve(fitness: Callable[[np.ndarray], float], bit_length: int, config: GaConfig) -> EvolutionResult:
    """Run the full loop: initialize, then (select, cross, mutate, elitism)
    per generation.

    The history records the best fitness seen so far after each generation,
    so it is non-decreasing; the returned best never exceeds the true
    maximum because it is always one of the evaluated chromosomes.
    """
    if bit_length < 1:
        raise ValidationError(f"bit length must be >= 1, got {bit_length}")
    rng = np.random.default_rng(config.seed)
    pop = rng.integers(0, 2, size=(config.population_size, bit_length), dtype=np.uint8)
    fits = _evaluate(fitness, pop)
    champ_idx = int(np.argmax(fits))
    champion = pop[champ_idx].copy()
    champion_fitness = float(fits[champ_idx])
    history: list[float] = []
    for gen in range(config.generations):
        elite_order = np.argsort(-fits, kind="stable")[: config.elitism]
        children = [pop[i].copy() for i in elite_order]
        while len(children) < config.population_size:
            p1 = select_tournament(pop, fits, config.tournament_size, rng)
            p2 = select_tournament(pop, fits, config.tournament_size, rng)
            if bit_length > 1 and rng.random() < config.crossover_prob:
                cut = int(rng.integers(1, bit_length))
                c1, c2 = crossover_point(p1, p2, cut)
            else:
                c1, c2 = p1.copy(), p2.copy()
            children.append(mutate_bits(c1, config.mutation_prob, rng))
            if len(children) < config.population_size:
                children.append(mutate_bits(c2, config.mutation_prob, rng))
        pop = np.stack(children)
        fits = _evaluate(fitness, pop)
        gen_best = int(np.argmax(fits))
        if fits[gen_best] > champion_fitness:
            champion = pop[gen_best].copy()
            champion_fitness = float(fits[gen_best])
        history.append(champion_fitness)
        log.debug("generation %d best %.6f", gen + 1, champion_fitness)
    return EvolutionResult(
        best_chromosome=champion,
        best_fitness=champion_fitness,
        history=history,
        generations=config.generations,
    )
