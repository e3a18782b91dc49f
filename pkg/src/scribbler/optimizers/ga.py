"""Real-coded genetic algorithm step with single elitism."""

from __future__ import annotations

import math

import numpy as np

from ..config import BackboneConfig
from .common import Bounds, Evaluator, Population, best_index, clamp, reinject


def tournament(fitness: np.ndarray, k: int, rng: np.random.Generator, count: int) -> np.ndarray:
    """Winners of ``count`` tournaments of ``k`` entrants drawn with replacement."""
    entrants = rng.integers(0, len(fitness), size=(count, k))
    scores = fitness[entrants]
    # Lowest index wins ties: sort entrants per row, then take the first maximum.
    order = np.argsort(entrants, axis=1, kind="stable")
    entrants = np.take_along_axis(entrants, order, axis=1)
    scores = np.take_along_axis(scores, order, axis=1)
    return entrants[np.arange(count), np.argmax(scores, axis=1)]


def arithmetic_crossover(p1: np.ndarray, p2: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    lam = rng.uniform(0.0, 1.0, size=p1.shape)
    do_cross = rng.uniform(0.0, 1.0, size=(len(p1), 1)) < rate
    return np.where(do_cross, lam * p1 + (1.0 - lam) * p2, p1)


def gaussian_mutation(x: np.ndarray, rate: float, sigma: float, rng: np.random.Generator) -> np.ndarray:
    mask = rng.uniform(0.0, 1.0, size=x.shape) < rate
    return x + mask * rng.normal(0.0, sigma, size=x.shape)


def ga_step(pop: Population, evaluate: Evaluator, bounds: Bounds, rng: np.random.Generator,
            t: int, t_max: int, cfg: BackboneConfig | None = None) -> Population:
    cfg = cfg or BackboneConfig(algorithm="ga")
    n = pop.size
    elite = best_index(pop.fitness)
    sigma = cfg.ga_mutation_scale * math.hypot(*bounds)

    p1 = tournament(pop.fitness, cfg.ga_tournament, rng, n - 1)
    p2 = tournament(pop.fitness, cfg.ga_tournament, rng, n - 1)
    children = arithmetic_crossover(pop.positions[p1], pop.positions[p2], cfg.ga_crossover_rate, rng)
    children = clamp(gaussian_mutation(children, cfg.ga_mutation_rate, sigma, rng), bounds)

    # The elite keeps its own slot; every other slot receives a child.
    slots = np.flatnonzero(np.arange(n) != elite)
    positions = pop.positions.copy()
    fitness = pop.fitness.copy()
    positions[slots] = children
    fitness[slots] = evaluate(children)
    nxt = Population(positions=positions, fitness=fitness, velocities=np.zeros((n, 2)))
    return reinject(nxt, cfg.reinjection, bounds, rng)
