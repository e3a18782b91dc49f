"""Image loading and the Laplacian-of-Gaussian edge map used as the target."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ImageFormatError, ParameterError

DEFAULT_SIGMA = 1.4
DEFAULT_MAX_DIM = 256

_SUPPORTED_FORMATS = {"PNG", "JPEG"}
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class RasterImage:
    """Image with intensities in [0, 1].

    ``data`` has shape ``(height, width)`` for grayscale or
    ``(height, width, 3)`` for RGB.
    """

    data: np.ndarray

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else self.data.shape[2]


@dataclass
class EdgeMap:
    """Normalized |LoG| response: bright edges (1.0) on a dark background."""

    data: np.ndarray

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def load_image(path) -> RasterImage:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such image: {path}")
    try:
        with Image.open(path) as im:
            if im.format not in _SUPPORTED_FORMATS:
                raise ImageFormatError(f"{path}: unsupported format {im.format}")
            return _decode(im)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path}: not a PNG or JPEG image") from exc


def _decode(im: Image.Image) -> RasterImage:
    mode = im.mode
    if mode in ("I;16", "I;16B", "I;16L", "I"):
        arr = np.asarray(im, dtype=np.float64) / 65535.0
        return RasterImage(np.clip(arr, 0.0, 1.0))
    if mode in ("1", "L", "LA"):
        arr = np.asarray(im.convert("L"), dtype=np.float64)
    else:
        arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    return RasterImage(arr / 255.0)


def to_grayscale(img: RasterImage) -> RasterImage:
    if img.channels == 1:
        return img
    return RasterImage(img.data @ _LUMA)


def resize_to_max(img: RasterImage, max_dim: int = DEFAULT_MAX_DIM) -> RasterImage:
    """Bilinear downscale so the longer side equals ``max_dim``.

    Images already within ``max_dim`` are returned unchanged.
    """
    if max_dim < 16:
        raise ParameterError(f"max_dim must be >= 16, got {max_dim}")
    w, h = img.width, img.height
    if max(w, h) <= max_dim:
        return img
    scale = max_dim / max(w, h)
    size = (max(1, round(w * scale)), max(1, round(h * scale)))
    planes = img.data[..., None] if img.channels == 1 else img.data
    out = np.stack(
        [
            np.asarray(
                Image.fromarray(planes[..., c].astype(np.float32), mode="F").resize(
                    size, Image.Resampling.BILINEAR
                ),
                dtype=np.float64,
            )
            for c in range(planes.shape[2])
        ],
        axis=-1,
    )
    out = np.clip(out, 0.0, 1.0)
    return RasterImage(out[..., 0] if img.channels == 1 else out)


def gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (offsets / sigma) ** 2)
    return k / k.sum()


def _convolve_rows(a: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """1D convolution along axis 1 with clamp-to-edge borders."""
    r = len(kernel) // 2
    padded = np.pad(a, ((0, 0), (r, r)), mode="edge")
    w = a.shape[1]
    out = np.zeros_like(a)
    for i, weight in enumerate(kernel):
        out += weight * padded[:, i : i + w]
    return out


def gaussian_blur(a: np.ndarray, sigma: float, radius: int) -> np.ndarray:
    k = gaussian_kernel(sigma, radius)
    return _convolve_rows(_convolve_rows(a, k).T, k).T


def laplacian(a: np.ndarray) -> np.ndarray:
    """4-neighbour Laplacian with clamp-to-edge borders."""
    p = np.pad(a, 1, mode="edge")
    return p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * a


def default_radius(sigma: float) -> int:
    return math.ceil(3.0 * sigma)


def log_edge_map(img: RasterImage, sigma: float = DEFAULT_SIGMA, kernel_radius: int | None = None) -> EdgeMap:
    """Blur, take the Laplacian, rectify and min-max normalize to [0, 1]."""
    if sigma <= 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if kernel_radius is None:
        kernel_radius = default_radius(sigma)
    if kernel_radius < default_radius(sigma):
        raise ParameterError(
            f"kernel_radius {kernel_radius} below ceil(3*sigma) = {default_radius(sigma)}"
        )
    if img.channels != 1:
        raise ParameterError("log_edge_map expects a single-channel image")
    response = np.abs(laplacian(gaussian_blur(img.data.astype(np.float64), sigma, kernel_radius)))
    lo, hi = float(response.min()), float(response.max())
    if hi - lo <= 1e-12:
        return EdgeMap(np.zeros_like(response))
    return EdgeMap((response - lo) / (hi - lo))


def edge_map_from_path(path, max_dim: int = DEFAULT_MAX_DIM, sigma: float = DEFAULT_SIGMA,
                       kernel_radius: int | None = None) -> EdgeMap:
    """Full pipeline: load, grayscale, downscale, LoG."""
    img = resize_to_max(to_grayscale(load_image(path)), max_dim)
    return log_edge_map(img, sigma, kernel_radius)


def dump_edge_map(edge: EdgeMap, path) -> None:
    """Write the edge map as an 8-bit grayscale PNG (bright edges)."""
    arr = np.round(255.0 * edge.data).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PNG")
