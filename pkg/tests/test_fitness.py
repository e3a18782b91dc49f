import hashlib
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scribbler.errors import ParameterError
from scribbler.fitness import (
    FitnessWeights,
    SseTracker,
    batch_scores,
    commit_point,
    eval_candidate,
    fitness_score,
    mse,
    psnr,
    score_from_mse,
    ssim,
)
from scribbler.imagepipe import EdgeMap
from scribbler.raster import Canvas, render_polyline


def digest(*arrays_):
    h = hashlib.sha256()
    for a in arrays_:
        h.update(np.ascontiguousarray(a).tobytes())
    return h.hexdigest()


def oracle_score(points, edge, thickness=1, weights=FitnessWeights()):
    h, w = edge.data.shape
    canvas = render_polyline(points, w, h, thickness)
    m = float(np.mean((canvas.data - edge.data) ** 2))
    return score_from_mse(m, weights)


def test_mse_examples():
    a = np.zeros((2, 2))
    assert mse(a, a) == 0.0
    assert mse(a, np.ones((2, 2))) == 1.0
    assert mse(np.array([0, 0, 1, 1.0]), np.array([0, 0.5, 1, 0])) == 0.3125


def test_mse_shape_mismatch():
    with pytest.raises(ParameterError):
        mse(np.zeros((2, 2)), np.zeros((2, 3)))


def test_psnr_examples():
    assert psnr(0.0) == 100.0
    assert psnr(1.0) == 0.0
    assert psnr(0.01) == pytest.approx(20.0, abs=1e-12)
    assert psnr(1e-30) == 100.0


def test_score_examples():
    w = FitnessWeights()
    assert score_from_mse(0.0, w) == 1.0
    assert score_from_mse(1.0, w) == 0.0
    assert score_from_mse(0.01, w) == pytest.approx(0.595, abs=1e-12)
    assert fitness_score(SseTracker(1.0, 100), w) == pytest.approx(0.595, abs=1e-12)


def test_weight_validation():
    with pytest.raises(ParameterError):
        FitnessWeights(alpha=-1.0)
    with pytest.raises(ParameterError):
        FitnessWeights(alpha=0.0, beta=0.0)


@settings(max_examples=200)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_score_order_matches_mse_order(m1, m2):
    s1, s2 = score_from_mse(m1, FitnessWeights()), score_from_mse(m2, FitnessWeights())
    assert 0.0 <= s1 <= 1.0
    if m1 < m2:
        assert s1 >= s2
    if s1 > s2:
        assert m1 < m2


@settings(max_examples=100)
@given(st.floats(1e-12, 1.0))
def test_psnr_is_exact_log(m):
    assert psnr(m) == min(10.0 * math.log10(1.0 / m), 100.0)


def test_candidate_on_lit_pixels_keeps_score():
    edge = EdgeMap(np.random.default_rng(0).uniform(size=(8, 8)))
    canvas = render_polyline([(0, 0), (7, 7)], 8, 8)
    tracker = SseTracker.from_images(canvas, edge)
    s = eval_candidate(canvas, tracker, edge, (7, 7), (3, 3))
    assert s == fitness_score(tracker, FitnessWeights())


def test_stamp_on_all_one_map_improves():
    edge = EdgeMap(np.ones((5, 5)))
    canvas = Canvas.blank(5, 5)
    tracker = SseTracker.from_images(canvas, edge)
    before = fitness_score(tracker, FitnessWeights())
    s = eval_candidate(canvas, tracker, edge, None, (2, 2))
    assert s == pytest.approx(score_from_mse(24 / 25, FitnessWeights()), abs=1e-15)
    assert s > before


@pytest.mark.parametrize("thickness", [1, 3])
def test_eval_candidate_matches_full_render(thickness):
    rng = np.random.default_rng(3)
    edge = EdgeMap(rng.uniform(size=(32, 32)))
    archive = [tuple(int(v) for v in rng.integers(0, 32, 2)) for _ in range(6)]
    canvas = render_polyline(archive, 32, 32, thickness)
    tracker = SseTracker.from_images(canvas, edge)
    checksum = digest(canvas.data)
    sse = tracker.sse
    cands = rng.integers(0, 32, size=(50, 2))
    batch = batch_scores(canvas, tracker, edge, archive[-1], cands, thickness)
    for i, (x, y) in enumerate(cands):
        c = (int(x), int(y))
        s = eval_candidate(canvas, tracker, edge, archive[-1], c, thickness)
        assert abs(s - oracle_score(archive + [c], edge, thickness)) < 1e-9
        assert s == batch[i]
    assert digest(canvas.data) == checksum
    assert tracker.sse == sse


def test_batch_with_empty_archive_matches_sequential():
    rng = np.random.default_rng(4)
    edge = EdgeMap(rng.uniform(size=(12, 15)))
    canvas = Canvas.blank(15, 12)
    tracker = SseTracker.from_images(canvas, edge)
    cands = np.stack([rng.integers(0, 15, 30), rng.integers(0, 12, 30)], axis=1)
    batch = batch_scores(canvas, tracker, edge, None, cands, 3)
    seq = [eval_candidate(canvas, tracker, edge, None, (int(x), int(y)), 3) for x, y in cands]
    assert batch.tolist() == seq


def test_commit_examples():
    rng = np.random.default_rng(5)
    edge = EdgeMap(rng.uniform(size=(10, 10)))
    canvas = Canvas.blank(10, 10)
    tracker = SseTracker.from_images(canvas, edge)
    commit_point(canvas, tracker, edge, None, (4, 4))
    commit_point(canvas, tracker, edge, (4, 4), (9, 1))
    commit_point(canvas, tracker, edge, (9, 1), (9, 1))
    full = SseTracker.from_images(canvas, edge).sse
    assert abs(tracker.sse - full) < 1e-6
    assert canvas.data.tobytes() == render_polyline([(4, 4), (9, 1), (9, 1)], 10, 10).data.tobytes()


def test_many_commits_do_not_drift():
    rng = np.random.default_rng(6)
    edge = EdgeMap(rng.uniform(size=(64, 64)))
    canvas = Canvas.blank(64, 64)
    tracker = SseTracker.from_images(canvas, edge)
    last = None
    for _ in range(1000):
        p = (int(rng.integers(64)), int(rng.integers(64)))
        commit_point(canvas, tracker, edge, last, p, int(rng.integers(1, 4)))
        last = p
        assert 0.0 <= tracker.sse <= tracker.pixel_count
    assert abs(tracker.sse - float(np.sum((canvas.data - edge.data) ** 2))) < 1e-6


def naive_ssim(a, b, win=7, c1=1e-4, c2=9e-4):
    vals = []
    for i in range(a.shape[0] - win + 1):
        for j in range(a.shape[1] - win + 1):
            x = a[i:i + win, j:j + win]
            y = b[i:i + win, j:j + win]
            mx, my = x.mean(), y.mean()
            vx, vy = ((x - mx) ** 2).mean(), ((y - my) ** 2).mean()
            cov = ((x - mx) * (y - my)).mean()
            vals.append((2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2)))
    return float(np.mean(vals))


def test_ssim_identical():
    a = np.random.default_rng(7).uniform(size=(12, 12))
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)


def test_ssim_constants():
    assert ssim(np.zeros((8, 8)), np.ones((8, 8))) == pytest.approx(1e-4 / (1 + 1e-4), rel=1e-9)


def test_ssim_matches_naive_loop():
    rng = np.random.default_rng(8)
    a, b = rng.uniform(size=(16, 16)), rng.uniform(size=(16, 16))
    assert abs(ssim(a, b) - naive_ssim(a, b)) < 1e-9
    assert abs(ssim(a, b, window=5) - naive_ssim(a, b, 5)) < 1e-9


def test_ssim_sparse_images_match_naive_loop():
    a = render_polyline([(0, 0), (19, 11), (3, 14)], 20, 15).data
    b = np.random.default_rng(9).uniform(size=(15, 20)) ** 8
    assert abs(ssim(a, b) - naive_ssim(a, b)) < 1e-9


def test_ssim_errors():
    with pytest.raises(ParameterError):
        ssim(np.zeros((6, 6)), np.zeros((6, 6)))
    with pytest.raises(ParameterError):
        ssim(np.zeros((8, 8)), np.zeros((8, 9)))
    with pytest.raises(ParameterError):
        ssim(np.zeros((8, 8)), np.zeros((8, 8)), window=4)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (9, 11), elements=st.floats(0.0, 1.0)))
def test_ssim_self_similarity(a):
    if a.var() > 1e-3:
        assert ssim(a, a) == pytest.approx(1.0, abs=1e-9)
