"""Population state and helpers shared by every backbone.

An evaluator maps an ``(m, 2)`` float array of (x, y) positions to ``m``
scores, higher being better. Unevaluated fitness entries are NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np

from ..errors import ParameterError

Evaluator = Callable[[np.ndarray], np.ndarray]
Bounds = Tuple[int, int]


@dataclass
class Population:
    positions: np.ndarray
    fitness: np.ndarray
    velocities: np.ndarray
    pbest_positions: Optional[np.ndarray] = None
    pbest_fitness: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return len(self.positions)

    def copy(self) -> "Population":
        def c(a):
            return None if a is None else a.copy()

        return replace(
            self,
            positions=self.positions.copy(),
            fitness=self.fitness.copy(),
            velocities=self.velocities.copy(),
            pbest_positions=c(self.pbest_positions),
            pbest_fitness=c(self.pbest_fitness),
        )

    def best_index(self) -> int:
        return best_index(self.fitness)


def upper(bounds: Bounds) -> np.ndarray:
    width, height = bounds
    return np.array([width - 1, height - 1], dtype=np.float64)


def clamp(positions: np.ndarray, bounds: Bounds) -> np.ndarray:
    return np.clip(positions, 0.0, upper(bounds))


def uniform_positions(n: int, bounds: Bounds, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(0.0, 1.0, size=(n, 2)) * upper(bounds)


def init_population(n: int, bounds: Bounds, rng: np.random.Generator) -> Population:
    if n < 4:
        raise ParameterError(f"population size must be >= 4, got {n}")
    return Population(
        positions=uniform_positions(n, bounds, rng),
        fitness=np.full(n, np.nan),
        velocities=np.zeros((n, 2)),
    )


def best_index(fitness: np.ndarray) -> int:
    # np.argmax returns the first maximum, i.e. the lowest index on ties.
    return int(np.argmax(fitness))


def ranked_best_first(fitness: np.ndarray) -> np.ndarray:
    """Indices sorted by descending fitness, ties by ascending index."""
    return np.lexsort((np.arange(len(fitness)), -fitness))


def evaluate_missing(pop: Population, evaluate: Evaluator) -> Population:
    """Fill NaN fitness entries in place and return ``pop``."""
    todo = np.flatnonzero(np.isnan(pop.fitness))
    if len(todo):
        pop.fitness[todo] = evaluate(pop.positions[todo])
    return pop


def reinject(pop: Population, fraction: float, bounds: Bounds, rng: np.random.Generator) -> Population:
    """Replace the ceil(fraction * N) worst individuals with random ones.

    The best individual is never replaced. Replacements get zero velocity,
    NaN fitness, and (for PSO) a personal best equal to their new position.
    """
    n = pop.size
    k = min(math.ceil(fraction * n), n - 1) if fraction > 0 else 0
    if k == 0:
        return pop
    worst = ranked_best_first(pop.fitness)[::-1][:k]
    pop.positions[worst] = uniform_positions(k, bounds, rng)
    pop.velocities[worst] = 0.0
    pop.fitness[worst] = np.nan
    if pop.pbest_positions is not None:
        pop.pbest_positions[worst] = pop.positions[worst]
        pop.pbest_fitness[worst] = np.nan
    return pop
