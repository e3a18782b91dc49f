"""Command-line front end: generate, composite, evaluate, compare.

Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
from PIL import Image

from . import __version__
from .config import ALGORITHMS, RunConfig
from .errors import ParameterError, ScribbleError
from .export import (
    build_report,
    convergence_rows,
    export_convergence_csv,
    export_merged_csv,
    export_png,
    export_report,
    export_svg,
    read_svg,
    write_json,
)
from .imagepipe import dump_edge_map, edge_map_from_path
from .orchestrator import image_metrics, run_composite, run_progressive
from .raster import Canvas, render_polyline

log = logging.getLogger("scribbler")

_DEFAULTS = RunConfig()

# flag dest -> path inside the RunConfig document
_CONFIG_KEYS = {
    "input": ("input",),
    "algo": ("backbone", "algorithm"),
    "generations": ("generations",),
    "population": ("population",),
    "seed": ("seed",),
    "max_dim": ("max_dim",),
    "sigma": ("sigma",),
    "kernel_radius": ("kernel_radius",),
    "thickness": ("thickness",),
    "alpha": ("weights", "alpha"),
    "beta": ("weights", "beta"),
    "reinjection": ("backbone", "reinjection"),
    "threads": ("threads",),
    "improve_only": ("improve_only",),
    "allow_repeat": ("allow_repeat",),
    "strategy": ("strategy",),
    "runs": ("runs",),
    "sub_generations": ("sub_generations",),
}


class UsageError(Exception):
    pass


def _image_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-dim", type=int, help=f"downscale so the longer side is at most this (default: {_DEFAULTS.max_dim})")
    p.add_argument("--sigma", type=float, help=f"LoG Gaussian sigma in pixels (default: {_DEFAULTS.sigma})")
    p.add_argument("--kernel-radius", type=int, help="Gaussian kernel radius (default: ceil(3*sigma))")


def _run_flags(p: argparse.ArgumentParser, composite: bool = False) -> None:
    p.add_argument("--input", help="input PNG or JPEG image")
    p.add_argument("--output-dir", default="out", help="directory for results (default: out)")
    p.add_argument("--config", help="RunConfig JSON document; explicit flags override it")
    p.add_argument("--algo", choices=ALGORITHMS, help=f"optimizer backbone (default: {_DEFAULTS.backbone.algorithm})")
    p.add_argument("--generations", type=int, help=f"generations G_max (default: {_DEFAULTS.generations})")
    p.add_argument("--population", type=int, help=f"population size N (default: {_DEFAULTS.population})")
    p.add_argument("--seed", type=int, help=f"random seed (default: {_DEFAULTS.seed})")
    _image_flags(p)
    p.add_argument("--thickness", type=int, help=f"stroke thickness in pixels (default: {_DEFAULTS.thickness})")
    p.add_argument("--alpha", type=float, help=f"PSNR weight (default: {_DEFAULTS.weights.alpha})")
    p.add_argument("--beta", type=float, help=f"MSE weight (default: {_DEFAULTS.weights.beta})")
    p.add_argument("--reinjection", type=float,
                   help=f"fraction of worst individuals replaced each step (default: {_DEFAULTS.backbone.reinjection})")
    p.add_argument("--snapshot-every", type=int, default=500,
                   help="write an intermediate PNG every N generations, 0 disables (default: 500)")
    p.add_argument("--threads", type=int, help=f"evaluation worker threads (default: {_DEFAULTS.threads})")
    p.add_argument("--improve-only", action=argparse.BooleanOptionalAction, default=None,
                   help="skip commits that do not improve the score (default: off)")
    p.add_argument("--allow-repeat", action=argparse.BooleanOptionalAction, default=None,
                   help="let the last committed point be proposed again (default: off)")
    p.add_argument("--strategy", choices=("batch", "sequential"),
                   help=f"candidate evaluation route (default: {_DEFAULTS.strategy})")
    p.add_argument("--dump-edge-map", action="store_true", help="also write edge_map.png (default: off)")
    if composite:
        p.add_argument("--runs", type=int, help=f"independent runs K (default: {_DEFAULTS.runs})")
        p.add_argument("--sub-generations", type=int,
                       help="generations per run (default: generations / runs)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scribbler", description="Turn images into scribble art.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="continuous run")
    _run_flags(g)

    c = sub.add_parser("composite", help="K independent runs blended together")
    _run_flags(c, composite=True)

    e = sub.add_parser("evaluate", help="score a render against the input's edge map")
    e.add_argument("--render", required=True, help="PNG or SVG render to score")
    e.add_argument("--input", required=True, help="original input image")
    _image_flags(e)
    e.add_argument("--thickness", type=int, help="stroke thickness when rasterizing an SVG (default: from the SVG)")
    e.add_argument("--no-invert", action="store_true",
                   help="PNG already has bright strokes on black, e.g. an edge map dump (default: off)")

    m = sub.add_parser("compare", help="run several backbones with shared settings")
    _run_flags(m)
    m.add_argument("--algos", default=",".join(ALGORITHMS),
                   help=f"comma-separated backbones (default: {','.join(ALGORITHMS)})")
    return parser


def _set(doc: dict, path: tuple, value) -> None:
    for key in path[:-1]:
        doc = doc.setdefault(key, {})
    doc[path[-1]] = value


def config_from_args(args, mode: str = "continuous") -> RunConfig:
    doc = RunConfig().to_dict()
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        for key, value in loaded.items():
            if isinstance(value, dict) and isinstance(doc.get(key), dict):
                doc[key].update(value)
            else:
                doc[key] = value
    for dest, path in _CONFIG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            _set(doc, path, value)
    doc["mode"] = mode
    try:
        return RunConfig.from_dict(doc)
    except (ParameterError, TypeError) as exc:
        raise UsageError(str(exc)) from exc


def _load_edge(config: RunConfig):
    if not config.input:
        raise UsageError("--input is required (flag or config file)")
    return edge_map_from_path(config.input, config.max_dim, config.sigma, config.kernel_radius)


def write_run(result, edge, outdir: Path, stem: str = "scribble") -> list:
    outdir.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    written = [outdir / f"{stem}.png", outdir / "convergence.csv", outdir / "report.json"]
    export_png(result.canvas, written[0], invert=True)
    export_convergence_csv(convergence_rows(result.archive), written[1])
    export_report(result, written[2])
    if result.archive.points:
        svg = outdir / f"{stem}.svg"
        export_svg(result.archive.points, edge.width, edge.height, cfg.thickness, svg)
        written.append(svg)
    else:
        log.warning("archive is empty; no SVG written")
    return written


def _snapshot_writer(outdir: Path, every: int):
    if every <= 0:
        return None
    snaps = outdir / "snapshots"

    def write(progress):
        snaps.mkdir(parents=True, exist_ok=True)
        export_png(progress.canvas, snaps / f"snapshot_{progress.generation:05d}.png")
        log.info("generation %d score %.6f", progress.generation, progress.score)

    return write


def cmd_generate(args) -> int:
    config = config_from_args(args)
    edge = _load_edge(config)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.dump_edge_map:
        dump_edge_map(edge, outdir / "edge_map.png")
    result = run_progressive(config, edge, _snapshot_writer(outdir, args.snapshot_every), args.snapshot_every)
    for path in write_run(result, edge, outdir):
        print(path)
    return 0


def cmd_composite(args) -> int:
    config = config_from_args(args, mode="composite")
    edge = _load_edge(config)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.dump_edge_map:
        dump_edge_map(edge, outdir / "edge_map.png")

    writers = {}

    def progress(i, p):
        if i not in writers:
            writers[i] = _snapshot_writer(outdir / f"run_{i}", args.snapshot_every)
        writers[i](p)

    every = args.snapshot_every
    result = run_composite(config, edge, progress if every > 0 else None, every)
    for i, r in enumerate(result.runs):
        write_run(r, edge, outdir / f"run_{i}")
    export_png(result.canvas, outdir / "composite.png", invert=True)
    export_report(result, outdir / "report.json")
    print(outdir / "composite.png")
    print(outdir / "report.json")
    return 0


def _load_render(args, edge) -> Canvas:
    path = Path(args.render)
    if path.suffix.lower() == ".svg":
        points, width, height, thickness = read_svg(path)
        return render_polyline(points, width, height, args.thickness or thickness)
    with Image.open(path) as im:
        v = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    return Canvas(v if args.no_invert else 1.0 - v)


def cmd_evaluate(args) -> int:
    sigma = args.sigma if args.sigma is not None else _DEFAULTS.sigma
    max_dim = args.max_dim if args.max_dim is not None else _DEFAULTS.max_dim
    edge = edge_map_from_path(args.input, max_dim, sigma, args.kernel_radius)
    canvas = _load_render(args, edge)
    if canvas.data.shape != edge.data.shape:
        print(f"error: render is {canvas.width}x{canvas.height} but the edge map is "
              f"{edge.width}x{edge.height}", file=sys.stderr)
        return 1
    print(json.dumps(image_metrics(canvas, edge), sort_keys=True))
    return 0


def cmd_compare(args) -> int:
    algos = [a.strip().lower() for a in args.algos.split(",") if a.strip()]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad or not algos:
        raise UsageError(f"unknown backbone(s) {', '.join(bad)}; choose from {', '.join(ALGORITHMS)}")
    base = config_from_args(args)
    edge = _load_edge(base)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.dump_edge_map:
        dump_edge_map(edge, outdir / "edge_map.png")
    archives, table = {}, []
    for algo in algos:
        cfg = replace(base, backbone=replace(base.backbone, algorithm=algo))
        sub = outdir / algo
        result = run_progressive(cfg, edge, _snapshot_writer(sub, args.snapshot_every), args.snapshot_every)
        write_run(result, edge, sub)
        archives[algo] = result.archive
        table.append({"algorithm": algo, **build_report(result)["metrics"], "duration_s": result.duration})
    export_merged_csv(archives, outdir / "compare.csv")
    write_json({"generations": base.generations, "seed": base.seed, "backbones": table}, outdir / "summary.json")
    print(f"{'backbone':<10}{'ssim':>10}{'psnr':>10}{'mse':>12}")
    for row in table:
        ssim_txt = "n/a" if row["ssim"] is None else f"{row['ssim']:.4f}"
        print(f"{row['algorithm']:<10}{ssim_txt:>10}{row['psnr']:>10.3f}{row['mse']:>12.6f}")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "composite": cmd_composite,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "composite" and args.runs is not None and args.runs < 2:
        parser.error("--runs must be at least 2")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ScribbleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
