"""DE/rand/1/bin step with greedy one-to-one selection."""

from __future__ import annotations

import numpy as np

from ..config import BackboneConfig
from ..errors import ParameterError
from .common import Bounds, Evaluator, Population, clamp, reinject


def distinct_donors(n: int, rng: np.random.Generator) -> np.ndarray:
    """For each i, three distinct indices drawn from range(n) without i."""
    picks = np.empty((n, 3), dtype=np.int64)
    for i in range(n):
        r = rng.choice(n - 1, size=3, replace=False)
        picks[i] = r + (r >= i)
    return picks


def de_step(pop: Population, evaluate: Evaluator, bounds: Bounds, rng: np.random.Generator,
            t: int, t_max: int, cfg: BackboneConfig | None = None) -> Population:
    cfg = cfg or BackboneConfig(algorithm="de")
    n = pop.size
    if n < 4:
        raise ParameterError("DE needs a population of at least 4")
    x = pop.positions
    r = distinct_donors(n, rng)
    mutant = x[r[:, 0]] + cfg.de_f * (x[r[:, 1]] - x[r[:, 2]])
    cross = rng.uniform(0.0, 1.0, size=x.shape) < cfg.de_cr
    cross[np.arange(n), rng.integers(0, 2, size=n)] = True
    trial = clamp(np.where(cross, mutant, x), bounds)
    trial_fit = evaluate(trial)

    keep = trial_fit >= pop.fitness
    nxt = Population(
        positions=np.where(keep[:, None], trial, x),
        fitness=np.where(keep, trial_fit, pop.fitness),
        velocities=np.zeros((n, 2)),
    )
    return reinject(nxt, cfg.reinjection, bounds, rng)
