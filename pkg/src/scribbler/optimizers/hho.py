"""Harris hawks optimization step (Heidari et al. 2019), maximizing fitness."""

from __future__ import annotations

import math

import numpy as np

from ..config import BackboneConfig
from .common import Bounds, Evaluator, Population, best_index, clamp, reinject, upper

EXPLORE, SOFT, HARD, SOFT_DIVE, HARD_DIVE = range(5)


def mantegna_sigma(beta: float) -> float:
    num = math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
    den = math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0)
    return (num / den) ** (1.0 / beta)


def levy_components(rng: np.random.Generator, shape, beta: float = 1.5):
    u = rng.normal(0.0, mantegna_sigma(beta), size=shape)
    v = rng.normal(0.0, 1.0, size=shape)
    return u, v


def levy_flight(rng: np.random.Generator, shape, beta: float = 1.5) -> np.ndarray:
    u, v = levy_components(rng, shape, beta)
    return u / np.abs(v) ** (1.0 / beta)


def escaping_energy(e0: np.ndarray, t: int, t_max: int) -> np.ndarray:
    return 2.0 * e0 * (1.0 - t / t_max)


def branches(energy: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Phase chosen by each hawk from its energy and chance draws."""
    e = np.abs(energy)
    out = np.where(r >= 0.5,
                   np.where(e >= 0.5, SOFT, HARD),
                   np.where(e >= 0.5, SOFT_DIVE, HARD_DIVE))
    return np.where(e >= 1.0, EXPLORE, out)


def hho_step(pop: Population, evaluate: Evaluator, bounds: Bounds, rng: np.random.Generator,
             t: int, t_max: int, cfg: BackboneConfig | None = None) -> Population:
    """One hawk update against the current best (the rabbit).

    The hawk holding the rabbit only accepts improving moves, so the best
    known position survives while the others follow the canonical phases.
    """
    cfg = cfg or BackboneConfig(algorithm="hho")
    n = pop.size
    x = pop.positions
    fit = pop.fitness
    ub = upper(bounds)
    rb = best_index(fit)
    rabbit = x[rb]
    mean = x.mean(axis=0)

    e0 = rng.uniform(-1.0, 1.0, size=n)
    energy = escaping_energy(e0, t, t_max)[:, None]
    q = rng.uniform(0.0, 1.0, size=n)
    r = rng.uniform(0.0, 1.0, size=n)
    phase = branches(energy[:, 0], r)
    jump = 2.0 * (1.0 - rng.uniform(0.0, 1.0, size=(n, 1)))
    rand_hawk = x[rng.integers(0, n, size=n)]
    c = rng.uniform(0.0, 1.0, size=(n, 4))

    perch_random = rand_hawk - c[:, :1] * np.abs(rand_hawk - 2.0 * c[:, 1:2] * x)
    perch_group = (rabbit - mean) - c[:, 2:3] * (c[:, 3:4] * ub)
    explore = np.where((q >= 0.5)[:, None], perch_random, perch_group)
    soft = (rabbit - x) - energy * np.abs(jump * rabbit - x)
    hard = rabbit - energy * np.abs(rabbit - x)
    y_soft = rabbit - energy * np.abs(jump * rabbit - x)
    y_hard = rabbit - energy * np.abs(jump * rabbit - mean)
    levy = cfg.hho_levy_scale * ub * levy_flight(rng, (n, 2), cfg.hho_beta)
    s = rng.uniform(0.0, 1.0, size=(n, 2))

    p = phase[:, None]
    first = np.select([p == EXPLORE, p == SOFT, p == HARD, p == SOFT_DIVE], [explore, soft, hard, y_soft], y_hard)
    first = clamp(first, bounds)
    first_fit = evaluate(first)

    dive = (phase == SOFT_DIVE) | (phase == HARD_DIVE)
    greedy = dive.copy()
    greedy[rb] = True
    accept = ~greedy | (first_fit > fit)
    new_x = np.where(accept[:, None], first, x)
    new_fit = np.where(accept, first_fit, fit)

    retry = np.flatnonzero(dive & ~accept)
    if len(retry):
        z = clamp(first[retry] + s[retry] * levy[retry], bounds)
        z_fit = evaluate(z)
        better = z_fit > fit[retry]
        new_x[retry[better]] = z[better]
        new_fit[retry[better]] = z_fit[better]

    nxt = Population(positions=new_x, fitness=new_fit, velocities=np.zeros((n, 2)))
    return reinject(nxt, cfg.reinjection, bounds, rng)
