import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from scribbler.errors import ImageFormatError, ParameterError
from scribbler.imagepipe import (
    RasterImage,
    dump_edge_map,
    edge_map_from_path,
    gaussian_blur,
    gaussian_kernel,
    load_image,
    log_edge_map,
    resize_to_max,
    to_grayscale,
)


def save(tmp_path, arr, name="img.png", mode=None, fmt=None):
    path = tmp_path / name
    Image.fromarray(np.asarray(arr, dtype=np.uint8), mode=mode).save(path, format=fmt)
    return path


def test_load_png_scales_to_unit_interval(tmp_path):
    img = load_image(save(tmp_path, [[0, 85], [170, 255]]))
    assert img.channels == 1
    np.testing.assert_allclose(img.data.ravel(), [0.0, 1 / 3, 2 / 3, 1.0], atol=1e-4)


def test_load_white_pixel(tmp_path):
    assert load_image(save(tmp_path, [[255]])).data.tolist() == [[1.0]]


def test_load_missing_path(tmp_path):
    with pytest.raises(OSError):
        load_image(tmp_path / "nope.png")


def test_load_rgb_jpeg(tmp_path):
    path = save(tmp_path, np.full((4, 5, 3), 128), "img.jpg", fmt="JPEG")
    img = load_image(path)
    assert (img.width, img.height, img.channels) == (5, 4, 3)


@pytest.mark.parametrize("fmt,name", [("BMP", "img.bmp"), ("GIF", "img.gif")])
def test_load_rejects_other_formats(tmp_path, fmt, name):
    with pytest.raises(ImageFormatError):
        load_image(save(tmp_path, [[0, 255]], name, fmt=fmt))


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "junk.png"
    path.write_bytes(b"not an image")
    with pytest.raises(ImageFormatError):
        load_image(path)


def test_grayscale_coefficients():
    img = RasterImage(np.array([[[1.0, 1.0, 1.0], [1.0, 0.0, 0.0]]]))
    np.testing.assert_allclose(to_grayscale(img).data, [[1.0, 0.299]])


def test_grayscale_identity_on_one_channel():
    img = RasterImage(np.array([[0.2, 0.4]]))
    assert to_grayscale(img) is img


def test_resize_keeps_aspect():
    out = resize_to_max(RasterImage(np.zeros((512, 1024))), 256)
    assert (out.width, out.height) == (256, 128)


def test_resize_leaves_small_images():
    img = RasterImage(np.zeros((100, 100)))
    assert resize_to_max(img, 256) is img


def test_resize_preserves_constant():
    out = resize_to_max(RasterImage(np.full((512, 512), 0.37)), 128)
    assert out.data.shape == (128, 128)
    np.testing.assert_allclose(out.data, 0.37, atol=1e-6)


def test_resize_rejects_tiny_max_dim():
    with pytest.raises(ParameterError):
        resize_to_max(RasterImage(np.zeros((4, 4))), 8)


def test_kernel_sums_to_one():
    for sigma in (0.5, 1.0, 1.4, 3.0):
        assert abs(gaussian_kernel(sigma, math.ceil(3 * sigma)).sum() - 1.0) < 1e-9


def test_blur_fixes_constant():
    a = np.full((9, 7), 0.6)
    np.testing.assert_allclose(gaussian_blur(a, 1.4, 5), a, atol=1e-12)


def test_constant_image_gives_zero_map():
    edge = log_edge_map(RasterImage(np.full((8, 8), 0.5)))
    assert not edge.data.any()


@pytest.mark.parametrize("sigma", [0.5, 1.0, 1.4, 2.0])
def test_impulse_peaks_at_centre(sigma):
    a = np.zeros((9, 9))
    a[4, 4] = 1.0
    edge = log_edge_map(RasterImage(a), sigma)
    assert edge.data.max() == 1.0
    y, x = np.unravel_index(np.argmax(edge.data), edge.data.shape)
    assert max(abs(y - 4), abs(x - 4)) <= 1


def direct_log(a, sigma, radius):
    """Independent oracle: 2D Gaussian and Laplacian by explicit clamped loops."""
    h, w = len(a), len(a[0])
    g = [math.exp(-0.5 * (k / sigma) ** 2) for k in range(-radius, radius + 1)]
    total = sum(g)
    g = [v / total for v in g]

    def at(img, y, x):
        return img[min(max(y, 0), h - 1)][min(max(x, 0), w - 1)]

    blur = [[sum(g[i] * g[j] * at(a, y + i - radius, x + j - radius)
                  for i in range(2 * radius + 1) for j in range(2 * radius + 1))
             for x in range(w)] for y in range(h)]
    lap = [[abs(at(blur, y - 1, x) + at(blur, y + 1, x) + at(blur, y, x - 1) + at(blur, y, x + 1)
                - 4 * blur[y][x]) for x in range(w)] for y in range(h)]
    lap = np.array(lap)
    return (lap - lap.min()) / (lap.max() - lap.min())


def test_vertical_step_matches_direct_convolution():
    a = np.zeros((8, 8))
    a[:, 4:] = 1.0
    edge = log_edge_map(RasterImage(a), sigma=1.0, kernel_radius=3)
    oracle = direct_log(a.tolist(), 1.0, 3)
    np.testing.assert_allclose(edge.data, oracle, atol=1e-9)
    column_peak = edge.data.max(axis=0)
    # |LoG| lobes sit about sigma from the edge, one on each side of it
    peaks = set(np.flatnonzero(np.isclose(column_peak, column_peak.max(), atol=1e-9)).tolist())
    assert peaks == {2, 5}
    np.testing.assert_allclose(edge.data, edge.data[:, ::-1], atol=1e-12)


def test_random_image_matches_direct_convolution(rng):
    a = rng.uniform(size=(7, 9))
    np.testing.assert_allclose(log_edge_map(RasterImage(a), 1.4, 5).data, direct_log(a.tolist(), 1.4, 5), atol=1e-9)


def test_parameter_errors():
    img = RasterImage(np.zeros((8, 8)))
    with pytest.raises(ParameterError):
        log_edge_map(img, sigma=0.0)
    with pytest.raises(ParameterError):
        log_edge_map(img, sigma=1.4, kernel_radius=3)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (10, 12), elements=st.floats(0.0, 1.0)))
def test_inversion_invariance(a):
    m1 = log_edge_map(RasterImage(a)).data
    m2 = log_edge_map(RasterImage(1.0 - a)).data
    np.testing.assert_allclose(m1, m2, atol=1e-6)


def test_pipeline_is_deterministic(input_png):
    a = edge_map_from_path(input_png)
    b = edge_map_from_path(input_png)
    assert a.data.tobytes() == b.data.tobytes()
    assert a.data.min() == 0.0 and a.data.max() == 1.0


def test_edge_dump_quantizes(tmp_path, rng):
    edge = log_edge_map(RasterImage(rng.uniform(size=(6, 6))))
    dump_edge_map(edge, tmp_path / "e.png")
    back = np.asarray(Image.open(tmp_path / "e.png"))
    assert back.dtype == np.uint8
    np.testing.assert_array_equal(back, np.round(255 * edge.data))
