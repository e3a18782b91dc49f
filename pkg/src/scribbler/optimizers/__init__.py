"""Metaheuristic backbones sharing one step interface."""

from .common import Population, evaluate_missing, init_population, reinject
from .de import de_step
from .ga import ga_step
from .gsa import gsa_step
from .hho import hho_step
from .pso import pso_step

STEPS = {
    "ga": ga_step,
    "de": de_step,
    "pso": pso_step,
    "gsa": gsa_step,
    "hho": hho_step,
}

__all__ = [
    "Population", "STEPS", "de_step", "evaluate_missing", "ga_step", "gsa_step",
    "hho_step", "init_population", "pso_step", "reinject",
]
