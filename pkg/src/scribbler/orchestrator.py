"""Progressive point selection: one committed point per generation."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from .config import RunConfig
from .fitness import (
    FitnessWeights,
    SseTracker,
    batch_scores,
    commit_point,
    eval_candidate,
    fitness_score,
    mse,
    psnr,
    ssim,
)
from .imagepipe import EdgeMap
from .optimizers import STEPS, evaluate_missing, init_population
from .raster import Canvas, Point

log = logging.getLogger(__name__)

SSIM_WINDOW = 7
# Score given to a candidate on the last committed pixel; valid scores lie in [0, 1].
REPEAT_SCORE = -1.0


@dataclass
class LogEntry:
    generation: int
    candidate: Point
    candidate_score: float
    score: float
    mse: float
    psnr: float
    committed: bool = True


@dataclass
class Archive:
    points: List[Point] = field(default_factory=list)
    log: List[LogEntry] = field(default_factory=list)


@dataclass
class Progress:
    generation: int
    score: float
    points: List[Point]
    canvas: Optional[Canvas] = None


@dataclass
class RunResult:
    config: RunConfig
    canvas: Canvas
    archive: Optional[Archive]
    duration: float
    metrics: dict
    runs: List["RunResult"] = field(default_factory=list)

    @property
    def archives(self) -> List[Archive]:
        if self.runs:
            return [r.archive for r in self.runs]
        return [self.archive]


def image_metrics(canvas: Canvas, edge: EdgeMap, weights: FitnessWeights | None = None) -> dict:
    weights = weights or FitnessWeights()
    m = mse(canvas, edge)
    s = ssim(canvas, edge, SSIM_WINDOW) if min(edge.data.shape) >= SSIM_WINDOW else None
    return {"mse": m, "psnr": psnr(m, weights.psnr_cap), "ssim": s}


class CandidateEvaluator:
    """Scores positions as the next archive point against the live canvas.

    Positions are rounded to the nearest pixel. ``calls`` counts scored rows.
    Unless ``allow_repeat`` is set, a candidate equal to the last committed
    point adds no segment and scores ``REPEAT_SCORE``; otherwise a converged
    population would re-propose it forever at zero cost.
    """

    def __init__(self, canvas: Canvas, tracker: SseTracker, edge: EdgeMap, thickness: int = 1,
                 weights: FitnessWeights | None = None, strategy: str = "batch",
                 pool: ThreadPoolExecutor | None = None, threads: int = 1,
                 allow_repeat: bool = False):
        self.canvas = canvas
        self.tracker = tracker
        self.edge = edge
        self.thickness = thickness
        self.weights = weights or FitnessWeights()
        self.strategy = strategy
        self.pool = pool
        self.threads = threads
        self.allow_repeat = allow_repeat
        self.last_point: Optional[Point] = None
        self.calls = 0

    def to_pixels(self, positions: np.ndarray) -> np.ndarray:
        upper = np.array([self.canvas.width - 1, self.canvas.height - 1])
        return np.clip(np.floor(np.asarray(positions) + 0.5), 0, upper).astype(np.int64).reshape(-1, 2)

    def _score_chunk(self, pixels: np.ndarray, canvas: Canvas) -> np.ndarray:
        if self.strategy == "batch":
            return batch_scores(canvas, self.tracker, self.edge, self.last_point, pixels,
                                self.thickness, self.weights)
        return np.array([
            eval_candidate(canvas, self.tracker, self.edge, self.last_point, (int(x), int(y)),
                           self.thickness, self.weights)
            for x, y in pixels
        ])

    def __call__(self, positions: np.ndarray) -> np.ndarray:
        pixels = self.to_pixels(positions)
        self.calls += len(pixels)
        if self.pool is None or self.threads == 1 or len(pixels) < 2:
            scores = self._score_chunk(pixels, self.canvas)
        else:
            chunks = [c for c in np.array_split(pixels, self.threads) if len(c)]
            # draw/undo mutates, so each sequential worker gets its own canvas clone
            canvases = [self.canvas if self.strategy == "batch" else self.canvas.copy() for _ in chunks]
            scores = np.concatenate(list(self.pool.map(self._score_chunk, chunks, canvases)))
        if not self.allow_repeat and self.last_point is not None:
            repeat = (pixels[:, 0] == self.last_point[0]) & (pixels[:, 1] == self.last_point[1])
            scores[repeat] = REPEAT_SCORE
        return scores


def run_progressive(config: RunConfig, edge: EdgeMap,
                    progress: Callable[[Progress], None] | None = None,
                    progress_every: int = 0, snapshot_canvas: bool = True) -> RunResult:
    """Run one continuous optimization for ``config.generations`` generations.

    Each generation scores the population against the current archive tail,
    commits the best candidate (ties to the lowest index) and advances the
    backbone by one step. ``progress`` fires after every ``progress_every``
    completed generations.
    """
    started = time.perf_counter()
    width, height = edge.width, edge.height
    bounds = (width, height)
    rng = np.random.default_rng(config.seed)
    canvas = Canvas.blank(width, height)
    tracker = SseTracker.from_images(canvas, edge)
    weights = config.weights
    step = STEPS[config.backbone.algorithm]
    archive = Archive()
    g_max = config.generations

    pool = ThreadPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        evaluator = CandidateEvaluator(canvas, tracker, edge, config.thickness, weights,
                                       config.strategy, pool, config.threads, config.allow_repeat)
        pop = init_population(config.population, bounds, rng)
        for t in range(g_max):
            evaluate_missing(pop, evaluator)
            b = pop.best_index()
            candidate = tuple(int(v) for v in evaluator.to_pixels(pop.positions[b])[0])
            candidate_score = float(pop.fitness[b])
            commit = not (config.improve_only and candidate_score <= fitness_score(tracker, weights))
            if commit:
                commit_point(canvas, tracker, edge, evaluator.last_point, candidate, config.thickness)
                archive.points.append(candidate)
                evaluator.last_point = candidate
            current = tracker.mse
            archive.log.append(LogEntry(t, candidate, candidate_score, fitness_score(tracker, weights),
                                        current, psnr(current, weights.psnr_cap), commit))
            if progress is not None and progress_every and (t + 1) % progress_every == 0:
                progress(Progress(t + 1, archive.log[-1].score, list(archive.points),
                                  canvas.copy() if snapshot_canvas else None))
            if t == g_max - 1:
                break
            if commit:
                pop.fitness = evaluator(pop.positions)
            pop = step(pop, evaluator, bounds, rng, t, g_max, config.backbone)
    finally:
        if pool is not None:
            pool.shutdown()

    duration = time.perf_counter() - started
    log.debug("%s run: %d generations, %d evaluations, %.2fs",
              config.backbone.algorithm, g_max, evaluator.calls, duration)
    return RunResult(config, canvas, archive, duration, image_metrics(canvas, edge, weights))


def composite_configs(config: RunConfig) -> List[RunConfig]:
    return [
        replace(config, seed=config.seed + i, generations=config.composite_generations,
                mode="continuous")
        for i in range(config.runs)
    ]


def blend_canvases(canvases: List[Canvas]) -> Canvas:
    """Pixelwise maximum, i.e. the union of binary strokes."""
    return Canvas(np.maximum.reduce([c.data for c in canvases]))


def run_composite(config: RunConfig, edge: EdgeMap,
                  progress: Callable[[int, Progress], None] | None = None,
                  progress_every: int = 0) -> RunResult:
    """K independent runs blended by pixelwise maximum (union of strokes)."""
    started = time.perf_counter()
    runs = []
    for i, sub in enumerate(composite_configs(config)):
        cb = None if progress is None else (lambda p, i=i: progress(i, p))
        runs.append(run_progressive(sub, edge, cb, progress_every))
    canvas = blend_canvases([r.canvas for r in runs])
    duration = time.perf_counter() - started
    return RunResult(config, canvas, None, duration, image_metrics(canvas, edge, config.weights), runs)


def run(config: RunConfig, edge: EdgeMap, **kwargs) -> RunResult:
    if config.mode == "composite":
        return run_composite(config, edge, **kwargs)
    return run_progressive(config, edge, **kwargs)
