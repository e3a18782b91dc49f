"""Binary line rasterization with draw/undo records.

Points are ``(x, y)`` integer pixel tuples. Canvas data is a float64
array of shape ``(height, width)`` holding 0.0 (background) or 1.0 (stroke).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

Point = Tuple[int, int]


@dataclass
class Canvas:
    data: np.ndarray

    @classmethod
    def blank(cls, width: int, height: int) -> "Canvas":
        return cls(np.zeros((height, width), dtype=np.float64))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    def copy(self) -> "Canvas":
        return Canvas(self.data.copy())

    def lit_count(self) -> int:
        return int(np.count_nonzero(self.data))


@dataclass
class TouchRecord:
    """Flat pixel indices touched by one draw and their previous values."""

    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    previous: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.indices)


def clamp_point(x: float, y: float, width: int, height: int) -> Point:
    return (int(min(max(x, 0), width - 1)), int(min(max(y, 0), height - 1)))


def _line_offsets(dx: np.ndarray, dy: np.ndarray, steps: np.ndarray):
    """Closed-form Bresenham offsets for canonically ordered segments.

    ``dx >= 0`` for every segment (start is lexicographically smaller).
    ``steps`` is the per-pixel step index along the major axis. The minor
    coordinate is round-half-up of the exact line, which is what the
    integer error-accumulator loop produces.
    """
    adx, ady = np.abs(dx), np.abs(dy)
    n = np.maximum(adx, ady)
    denom = np.maximum(2 * n, 1)
    sy = np.sign(dy)
    x_major = adx >= ady
    ox = np.where(x_major, steps, (2 * steps * adx + n) // denom)
    oy = sy * np.where(x_major, (2 * steps * ady + n) // denom, steps)
    return ox, oy


def bresenham(p0: Point, p1: Point) -> np.ndarray:
    """Pixels from ``p0`` to ``p1`` inclusive as an ``(n, 2)`` array of (x, y).

    The path is computed from the lexicographically smaller endpoint, so the
    pixel set does not depend on direction.
    """
    (x0, y0), (x1, y1) = p0, p1
    flip = (x1, y1) < (x0, y0)
    if flip:
        x0, y0, x1, y1 = x1, y1, x0, y0
    dx, dy = x1 - x0, y1 - y0
    n = max(abs(dx), abs(dy))
    steps = np.arange(n + 1, dtype=np.int64)
    ox, oy = _line_offsets(np.int64(dx), np.int64(dy), steps)
    path = np.stack([x0 + ox, y0 + oy], axis=1)
    return path[::-1].copy() if flip else path


def disc_offsets(thickness: int) -> np.ndarray:
    """Offsets (dx, dy) of a Euclidean disc of radius ``thickness // 2``."""
    r = int(thickness) // 2
    span = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(span, span, indexing="xy")
    keep = dx * dx + dy * dy <= r * r
    return np.stack([dx[keep], dy[keep]], axis=1)


def thicken(pixels: np.ndarray, thickness: int, width: int, height: int) -> np.ndarray:
    """Stamp a disc at every pixel; returns unique in-bounds (x, y) pairs.

    Rows are sorted by flat index ``y * width + x``.
    """
    pixels = np.asarray(pixels, dtype=np.int64).reshape(-1, 2)
    if thickness < 1:
        raise ValueError("thickness must be >= 1")
    if thickness > 1:
        pixels = (pixels[:, None, :] + disc_offsets(thickness)[None, :, :]).reshape(-1, 2)
    x, y = pixels[:, 0], pixels[:, 1]
    inside = (x >= 0) & (x < width) & (y >= 0) & (y < height)
    flat = np.unique(y[inside] * width + x[inside])
    return np.stack([flat % width, flat // width], axis=1)


def segment_indices(p0: Point, p1: Point, thickness: int, width: int, height: int) -> np.ndarray:
    """Sorted unique flat indices lit by the thickened segment."""
    px = thicken(bresenham(p0, p1), thickness, width, height)
    return px[:, 1] * width + px[:, 0]


def batch_segment_indices(start: Point | None, ends: np.ndarray, thickness: int,
                          width: int, height: int):
    """Touched pixels for many segments sharing one start point.

    With ``start=None`` each end point is stamped alone. Returns
    ``(owner, flat)``: for every (segment, pixel) pair, the segment's row in
    ``ends`` and the flat pixel index, sorted by owner then pixel and free of
    duplicates.
    """
    ends = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    m = len(ends)
    if start is None:
        starts = ends
    else:
        starts = np.broadcast_to(np.asarray(start, dtype=np.int64), ends.shape)
    swap = (ends[:, 0] < starts[:, 0]) | ((ends[:, 0] == starts[:, 0]) & (ends[:, 1] < starts[:, 1]))
    a = np.where(swap[:, None], ends, starts)
    b = np.where(swap[:, None], starts, ends)
    dx, dy = b[:, 0] - a[:, 0], b[:, 1] - a[:, 1]
    n = np.maximum(np.abs(dx), np.abs(dy))
    steps = np.arange(int(n.max()) + 1 if m else 1, dtype=np.int64)[None, :]
    ox, oy = _line_offsets(dx[:, None], dy[:, None], steps)
    valid = steps <= n[:, None]
    owner = np.broadcast_to(np.arange(m)[:, None], valid.shape)[valid]
    x = (a[:, 0, None] + ox)[valid]
    y = (a[:, 1, None] + oy)[valid]
    if thickness > 1:
        off = disc_offsets(thickness)
        x = (x[:, None] + off[None, :, 0]).ravel()
        y = (y[:, None] + off[None, :, 1]).ravel()
        owner = np.repeat(owner, len(off))
    inside = (x >= 0) & (x < width) & (y >= 0) & (y < height)
    hw = width * height
    keys = np.unique(owner[inside] * hw + y[inside] * width + x[inside])
    return keys // hw, keys % hw


def draw_indices(canvas: Canvas, indices: np.ndarray) -> TouchRecord:
    flat = canvas.data.reshape(-1)
    record = TouchRecord(indices.copy(), flat[indices].copy())
    flat[indices] = 1.0
    return record


def draw_segment(canvas: Canvas, p0: Point, p1: Point, thickness: int = 1) -> TouchRecord:
    """Set the thickened segment to 1.0 and return what was overwritten."""
    idx = segment_indices(p0, p1, thickness, canvas.width, canvas.height)
    return draw_indices(canvas, idx)


def undo(canvas: Canvas, record: TouchRecord) -> None:
    canvas.data.reshape(-1)[record.indices] = record.previous


def render_polyline(points: Sequence[Point], width: int, height: int, thickness: int = 1) -> Canvas:
    canvas = Canvas.blank(width, height)
    if len(points) == 1:
        draw_segment(canvas, points[0], points[0], thickness)
    for p0, p1 in zip(points[:-1], points[1:]):
        draw_segment(canvas, p0, p1, thickness)
    return canvas
