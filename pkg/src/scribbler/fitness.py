"""Objective between the edge map and the scribble canvas.

The score combines normalized PSNR and MSE. Since PSNR is a monotone function
of MSE at a fixed dynamic range, the two terms never disagree on ranking; both
are kept so the weights can be varied.

All SSE deltas are summed with :func:`math.fsum`, which is exactly rounded and
therefore independent of pixel order. That makes the draw/undo evaluator, the
vectorized batch evaluator and any thread split produce bit-identical scores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .imagepipe import EdgeMap
from .raster import Canvas, Point, batch_segment_indices, draw_segment, undo


@dataclass
class FitnessWeights:
    alpha: float = 0.5
    beta: float = 0.5
    psnr_cap: float = 100.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta <= 0:
            raise ParameterError("weights must be non-negative with a positive sum")
        if self.psnr_cap <= 0:
            raise ParameterError("psnr_cap must be positive")


@dataclass
class SseTracker:
    sse: float
    pixel_count: int

    @classmethod
    def from_images(cls, canvas: Canvas, edge: EdgeMap) -> "SseTracker":
        diff = canvas.data - edge.data
        return cls(math.fsum((diff * diff).ravel().tolist()), diff.size)

    @property
    def mse(self) -> float:
        return self.sse / self.pixel_count


def _data(img) -> np.ndarray:
    if isinstance(img, (Canvas, EdgeMap)) or hasattr(img, "channels"):
        return img.data
    return np.asarray(img, dtype=np.float64)


def mse(a, b) -> float:
    a, b = _data(a), _data(b)
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return math.fsum((d * d).ravel().tolist()) / d.size


def psnr(mse_value: float, cap: float = 100.0) -> float:
    if mse_value <= 0:
        return cap
    return min(cap, 10.0 * math.log10(1.0 / mse_value))


def score_from_mse(mse_value: float, weights: FitnessWeights) -> float:
    return (weights.alpha * psnr(mse_value, weights.psnr_cap) / weights.psnr_cap
            + weights.beta * (1.0 - mse_value))


def fitness_score(tracker: SseTracker, weights: FitnessWeights) -> float:
    """Higher is better; in [0, 1] whenever mse <= 1."""
    return score_from_mse(tracker.mse, weights)


def _pixel_deltas(flat_canvas: np.ndarray, flat_edge: np.ndarray, idx: np.ndarray,
                  new: np.ndarray | float = 1.0) -> np.ndarray:
    target = flat_edge[idx]
    dn = new - target
    do = flat_canvas[idx] - target
    return dn * dn - do * do


def eval_candidate(canvas: Canvas, tracker: SseTracker, edge: EdgeMap, last_point: Point | None,
                   candidate: Point, thickness: int = 1,
                   weights: FitnessWeights | None = None) -> float:
    """Score the archive extended by ``candidate`` via draw, measure, undo."""
    weights = weights or FitnessWeights()
    p0 = candidate if last_point is None else last_point
    record = draw_segment(canvas, p0, candidate, thickness)
    try:
        delta = _record_delta(canvas, edge, record)
        return score_from_mse((tracker.sse + delta) / tracker.pixel_count, weights)
    finally:
        undo(canvas, record)


def _record_delta(canvas: Canvas, edge: EdgeMap, record) -> float:
    flat_edge = edge.data.reshape(-1)
    target = flat_edge[record.indices]
    dn = canvas.data.reshape(-1)[record.indices] - target
    do = record.previous - target
    return math.fsum((dn * dn - do * do).tolist())


def commit_point(canvas: Canvas, tracker: SseTracker, edge: EdgeMap, last_point: Point | None,
                 point: Point, thickness: int = 1) -> None:
    p0 = point if last_point is None else last_point
    record = draw_segment(canvas, p0, point, thickness)
    tracker.sse += _record_delta(canvas, edge, record)


def batch_deltas(canvas: Canvas, edge: EdgeMap, last_point: Point | None, candidates: np.ndarray,
                 thickness: int = 1) -> np.ndarray:
    """SSE change for each candidate in an ``(m, 2)`` integer array.

    Read-only on ``canvas``; equal bit for bit to the draw/undo route.
    """
    candidates = np.asarray(candidates, dtype=np.int64).reshape(-1, 2)
    m = len(candidates)
    if m == 0:
        return np.zeros(0)
    owner, flat = batch_segment_indices(last_point, candidates, thickness, canvas.width, canvas.height)
    d = _pixel_deltas(canvas.data.reshape(-1), edge.data.reshape(-1), flat)
    bounds = np.searchsorted(owner, np.arange(m + 1))
    return np.array([math.fsum(d[bounds[i]:bounds[i + 1]].tolist()) for i in range(m)])


def batch_scores(canvas: Canvas, tracker: SseTracker, edge: EdgeMap, last_point: Point | None,
                 candidates: np.ndarray, thickness: int = 1,
                 weights: FitnessWeights | None = None) -> np.ndarray:
    weights = weights or FitnessWeights()
    deltas = batch_deltas(canvas, edge, last_point, candidates, thickness)
    return np.array([score_from_mse((tracker.sse + d) / tracker.pixel_count, weights) for d in deltas])


def ssim(a, b, window: int = 7, k1: float = 0.01, k2: float = 0.03) -> float:
    """Mean SSIM over all valid ``window x window`` uniform windows, stride 1.

    Local variances and covariance use the population (1/n) normalization;
    dynamic range is 1.0.
    """
    a = _data(a).astype(np.float64)
    b = _data(b).astype(np.float64)
    if a.shape != b.shape:
        raise ParameterError(f"shape mismatch: {a.shape} vs {b.shape}")
    if window < 1 or window % 2 == 0:
        raise ParameterError("window must be a positive odd integer")
    if min(a.shape) < window:
        raise ParameterError(f"image {a.shape} smaller than window {window}")
    c1, c2 = k1 ** 2, k2 ** 2

    def box_mean(x):
        s = np.pad(x, ((1, 0), (1, 0))).cumsum(0).cumsum(1)
        w = window
        return (s[w:, w:] - s[:-w, w:] - s[w:, :-w] + s[:-w, :-w]) / (w * w)

    # Variances are shift invariant; centring keeps integral-image differences well conditioned.
    ma, mb = a.mean(), b.mean()
    a, b = a - ma, b - mb
    ca, cb = box_mean(a), box_mean(b)
    var_a = box_mean(a * a) - ca ** 2
    var_b = box_mean(b * b) - cb ** 2
    cov = box_mean(a * b) - ca * cb
    mu_a, mu_b = ca + ma, cb + mb
    smap = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2))
    return float(smap.mean())
