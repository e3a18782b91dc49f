"""Gravitational search step (Rashedi et al. 2009), maximizing fitness."""

from __future__ import annotations

import math

import numpy as np

from ..config import BackboneConfig
from .common import Bounds, Evaluator, Population, clamp, ranked_best_first, reinject

_EPS = 1e-12


def gravity(t: int, t_max: int, g0: float = 100.0, alpha: float = 20.0) -> float:
    return g0 * math.exp(-alpha * t / t_max)


def masses(fitness: np.ndarray) -> np.ndarray:
    """Normalized masses summing to 1; uniform when all fitness values tie."""
    best, worst = fitness.max(), fitness.min()
    if best == worst:
        return np.full(len(fitness), 1.0 / len(fitness))
    m = (fitness - worst) / (best - worst)
    return m / m.sum()


def kbest_count(n: int, t: int, t_max: int) -> int:
    """Number of attracting agents, shrinking linearly from n to 1."""
    return max(1, int(round(n - (n - 1) * t / t_max)))


def gsa_step(pop: Population, evaluate: Evaluator, bounds: Bounds, rng: np.random.Generator,
             t: int, t_max: int, cfg: BackboneConfig | None = None) -> Population:
    cfg = cfg or BackboneConfig(algorithm="gsa")
    n = pop.size
    x = pop.positions
    mass = masses(pop.fitness)
    g = gravity(t, t_max, cfg.gsa_g0, cfg.gsa_alpha)
    kbest = ranked_best_first(pop.fitness)[: kbest_count(n, t, t_max)]

    diff = x[None, kbest, :] - x[:, None, :]  # (n, k, 2): towards each attractor
    dist = np.linalg.norm(diff, axis=2)
    weight = rng.uniform(0.0, 1.0, size=dist.shape) * mass[kbest][None, :] / (dist + _EPS)
    weight[kbest[None, :] == np.arange(n)[:, None]] = 0.0
    # force_i / M_i: the passive mass cancels, which also keeps zero-mass agents finite
    accel = g * np.einsum("ik,ikd->id", weight, diff)

    v = rng.uniform(0.0, 1.0, size=x.shape) * pop.velocities + accel
    x = clamp(x + v, bounds)
    nxt = Population(positions=x, fitness=evaluate(x), velocities=v)
    return reinject(nxt, cfg.reinjection, bounds, rng)
