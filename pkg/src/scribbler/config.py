"""Run configuration shared by the orchestrator, the CLI and the JSON reports."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ParameterError
from .fitness import FitnessWeights

ALGORITHMS = ("ga", "de", "pso", "gsa", "hho")


@dataclass
class BackboneConfig:
    """Optimizer choice plus every per-algorithm knob, flat for easy JSON."""

    algorithm: str = "ga"
    reinjection: float = 0.3
    # GA
    ga_tournament: int = 3
    ga_crossover_rate: float = 0.9
    ga_mutation_rate: float = 0.2
    ga_mutation_scale: float = 0.05  # fraction of the image diagonal
    # DE/rand/1/bin
    de_f: float = 0.5
    de_cr: float = 0.9
    # PSO
    pso_w: float = 0.7
    pso_c1: float = 1.5
    pso_c2: float = 1.5
    pso_vmax: float = 0.1  # fraction of each dimension
    # GSA
    gsa_g0: float = 100.0
    gsa_alpha: float = 20.0
    # HHO
    hho_beta: float = 1.5
    hho_levy_scale: float = 0.01

    def __post_init__(self):
        self.algorithm = self.algorithm.lower()
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if not 0.0 <= self.reinjection < 1.0:
            raise ParameterError("reinjection must lie in [0, 1)")
        for name in ("ga_crossover_rate", "ga_mutation_rate", "de_cr"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1]")
        if self.ga_tournament < 1:
            raise ParameterError("ga_tournament must be >= 1")
        if not 0.0 < self.hho_beta <= 2.0:
            raise ParameterError("hho_beta must lie in (0, 2]")


@dataclass
class RunConfig:
    input: str | None = None
    max_dim: int = 256
    sigma: float = 1.4
    kernel_radius: int | None = None
    backbone: BackboneConfig = field(default_factory=BackboneConfig)
    population: int = 100
    generations: int = 2000
    thickness: int = 1
    weights: FitnessWeights = field(default_factory=FitnessWeights)
    seed: int = 0
    mode: str = "continuous"
    runs: int = 4
    sub_generations: int | None = None
    improve_only: bool = False
    allow_repeat: bool = False
    threads: int = 1
    strategy: str = "batch"

    def __post_init__(self):
        if self.generations < 1:
            raise ParameterError("generations must be >= 1")
        if self.population < 4:
            raise ParameterError("population must be >= 4")
        if self.thickness < 1:
            raise ParameterError("thickness must be >= 1")
        if self.sigma <= 0:
            raise ParameterError("sigma must be positive")
        if self.max_dim < 16:
            raise ParameterError("max_dim must be >= 16")
        if self.threads < 1:
            raise ParameterError("threads must be >= 1")
        if self.mode not in ("continuous", "composite"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if self.strategy not in ("batch", "sequential"):
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        if self.mode == "composite":
            if self.runs < 2:
                raise ParameterError("composite mode needs runs >= 2")
            if self.composite_generations < 1:
                raise ParameterError("sub_generations must be >= 1")

    @property
    def composite_generations(self) -> int:
        if self.sub_generations is not None:
            return self.sub_generations
        return max(1, self.generations // max(self.runs, 1))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if isinstance(doc.get("backbone"), dict):
            doc["backbone"] = BackboneConfig(**doc["backbone"])
        if isinstance(doc.get("weights"), dict):
            doc["weights"] = FitnessWeights(**doc["weights"])
        return cls(**doc)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
