import numpy as np
import pytest
from PIL import Image

from scribbler.imagepipe import EdgeMap, RasterImage, log_edge_map

ACCEPTANCE_RESULTS = []


def ring_and_bar(n=256, half_width=1.5):
    """Line drawing of a ring and a diagonal bar, strokes 1.0 on 0.0."""
    yy, xx = np.mgrid[0:n, 0:n].astype(float)
    c = (n - 1) / 2
    r = np.hypot(xx - c, yy - c)
    img = np.zeros((n, n))
    img[np.abs(r - 0.33 * n) < half_width] = 1.0
    off_diagonal = np.abs(xx - yy) / np.sqrt(2)
    img[(off_diagonal < half_width) & (xx > 0.1 * n) & (xx < 0.9 * n)] = 1.0
    return RasterImage(img)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per criterion; returns ``passed`` for asserting."""

    def record(number, passed, detail):
        ACCEPTANCE_RESULTS.append((number, bool(passed), detail))
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
        return bool(passed)

    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def ring_edge_256():
    return log_edge_map(ring_and_bar(256))


@pytest.fixture(scope="session")
def ring_edge_128():
    return log_edge_map(ring_and_bar(128))


def random_edge(rng, h, w):
    return EdgeMap(rng.uniform(0.0, 1.0, size=(h, w)))


@pytest.fixture
def input_png(tmp_path):
    """Small RGB test photo: a red disc and a green bar."""
    yy, xx = np.mgrid[0:96, 0:128]
    img = np.full((96, 128, 3), 235, np.uint8)
    img[((xx - 64) ** 2 + (yy - 48) ** 2) < 30 ** 2] = (200, 60, 40)
    img[30:38, 10:118] = (20, 160, 90)
    path = tmp_path / "input.png"
    Image.fromarray(img).save(path)
    return path


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
