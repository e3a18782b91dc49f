"""Global-best PSO step with inertia weight and per-axis velocity clamping."""

from __future__ import annotations

import numpy as np

from ..config import BackboneConfig
from .common import Bounds, Evaluator, Population, best_index, clamp, reinject


def pso_step(pop: Population, evaluate: Evaluator, bounds: Bounds, rng: np.random.Generator,
             t: int, t_max: int, cfg: BackboneConfig | None = None) -> Population:
    """One swarm update.

    Personal bests are re-scored with ``evaluate`` first because the
    objective may have shifted since they were recorded.
    """
    cfg = cfg or BackboneConfig(algorithm="pso")
    pop = pop.copy()
    if pop.pbest_positions is None:
        pop.pbest_positions = pop.positions.copy()
    pbest = pop.pbest_positions
    pbest_fit = evaluate(pbest)
    gbest = pbest[best_index(pbest_fit)]

    x = pop.positions
    r1 = rng.uniform(0.0, 1.0, size=x.shape)
    r2 = rng.uniform(0.0, 1.0, size=x.shape)
    v = cfg.pso_w * pop.velocities + cfg.pso_c1 * r1 * (pbest - x) + cfg.pso_c2 * r2 * (gbest - x)
    vmax = cfg.pso_vmax * np.asarray(bounds, dtype=np.float64)
    v = np.clip(v, -vmax, vmax)
    x = clamp(x + v, bounds)
    fit = evaluate(x)

    improved = fit > pbest_fit
    pop.positions = x
    pop.velocities = v
    pop.fitness = fit
    pop.pbest_positions = np.where(improved[:, None], x, pbest)
    pop.pbest_fitness = np.where(improved, fit, pbest_fit)
    return reinject(pop, cfg.reinjection, bounds, rng)
