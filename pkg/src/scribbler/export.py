"""Writers for PNG renders, SVG polylines, convergence CSVs and JSON reports."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np
from PIL import Image

from .errors import ParameterError
from .orchestrator import Archive, RunResult
from .raster import Canvas, Point

CSV_HEADER = ["generation", "x", "y", "score", "mse", "psnr"]


@dataclass
class ConvergenceRow:
    generation: int
    committed_x: Optional[int]
    committed_y: Optional[int]
    archive_score: float
    mse: float
    psnr: float


def convergence_rows(archive: Archive) -> List[ConvergenceRow]:
    """One row per generation; x and y are None where nothing was committed."""
    rows = []
    for e in archive.log:
        x, y = e.candidate if e.committed else (None, None)
        rows.append(ConvergenceRow(e.generation, x, y, e.score, e.mse, e.psnr))
    return rows


def export_png(canvas: Canvas, path, invert: bool = True) -> None:
    """8-bit grayscale PNG; inverted output shows dark strokes on white."""
    v = 1.0 - canvas.data if invert else canvas.data
    Image.fromarray(np.round(255.0 * v).astype(np.uint8), mode="L").save(path, format="PNG")


def svg_document(points: Sequence[Point], width: int, height: int, thickness: int = 1) -> str:
    if not points:
        raise ParameterError("cannot export an empty archive as SVG")
    coords = " ".join(f"{int(x)},{int(y)}" for x, y in points)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n'
        '<rect x="0" y="0" width="100%" height="100%" fill="white"/>\n'
        f'<polyline points="{coords}" fill="none" stroke="black" stroke-width="{thickness}" '
        'stroke-linecap="round" stroke-linejoin="round"/>\n'
        "</svg>\n"
    )


def export_svg(points: Sequence[Point], width: int, height: int, thickness: int, path) -> None:
    """Single polyline in archive order.

    A one-point archive yields a degenerate polyline that most renderers
    draw as nothing.
    """
    Path(path).write_text(svg_document(points, width, height, thickness), encoding="utf-8")


def read_svg(path):
    """Parse an SVG written by :func:`export_svg`.

    Returns ``(points, width, height, thickness)``.
    """
    text = Path(path).read_text(encoding="utf-8")
    box = re.search(r'viewBox="0 0 (\d+) (\d+)"', text)
    poly = re.search(r'<polyline points="([^"]*)"', text)
    stroke = re.search(r'stroke-width="(\d+)"', text)
    if not box or not poly:
        raise ParameterError(f"{path}: not a scribble SVG")
    points = [tuple(int(v) for v in pair.split(",")) for pair in poly.group(1).split()]
    return points, int(box.group(1)), int(box.group(2)), int(stroke.group(1)) if stroke else 1


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, float) else str(v)


def export_convergence_csv(rows: Iterable[ConvergenceRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.generation, _fmt(r.committed_x), _fmt(r.committed_y),
                        _fmt(r.archive_score), _fmt(r.mse), _fmt(r.psnr)])


def read_convergence_csv(path) -> List[ConvergenceRow]:
    def opt_int(s):
        return int(s) if s != "" else None

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            ConvergenceRow(int(r["generation"]), opt_int(r["x"]), opt_int(r["y"]),
                           float(r["score"]), float(r["mse"]), float(r["psnr"]))
            for r in reader
        ]


def export_merged_csv(archives: dict, path) -> None:
    """Generation by backbone matrix of archive scores."""
    names = list(archives)
    columns = [[e.score for e in archives[n].log] for n in names]
    length = max((len(c) for c in columns), default=0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", *names])
        for g in range(length):
            w.writerow([g, *(_fmt(c[g]) if g < len(c) else "" for c in columns)])


def _metrics_block(result: RunResult) -> dict:
    return {k: result.metrics[k] for k in ("mse", "psnr", "ssim")}


def build_report(result: RunResult) -> dict:
    doc = {
        "config": result.config.to_dict(),
        "metrics": _metrics_block(result),
        "duration_s": result.duration,
    }
    if result.runs:
        doc["points"] = sum(len(r.archive.points) for r in result.runs)
        doc["runs"] = [
            {"seed": r.config.seed, "points": len(r.archive.points),
             "metrics": _metrics_block(r), "duration_s": r.duration}
            for r in result.runs
        ]
    else:
        doc["points"] = len(result.archive.points)
    return doc


def export_report(result: RunResult, path) -> None:
    write_json(build_report(result), path)


def write_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
