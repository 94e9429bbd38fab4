"""Command-line interface.

Subcommands: extract (image -> cloud CSV), cluster (cloud -> groups JSON),
evaluate (prediction vs truth -> metrics JSON), synth (spec -> cloud CSV and,
in 2-D, a PGM), and render (cloud CSV or cluster JSON -> SVG). Exit codes:
0 success, 1 computation error, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import Config, read_synth_spec
from .engine import ClusterResult, lcuts
from .errors import InputError, LcutsError
from .geometry import Node, PointCloud, read_cloud_csv, write_cloud_csv
from .graph import build_adjacency, write_adjacency_csv
from .direction import assign_all_directions
from .metrics import evaluate
from .pipeline import extract_nodes
from .raster import bilinear_sample, read_image, write_pgm
from .render import render_svg, write_svg
from .synth import generate_cloud, generate_image

log = logging.getLogger("lcuts")


def _load_config(path: str | None) -> Config:
    return Config.from_file(path) if path else Config.default()


def _result_json(result: ClusterResult, cloud: PointCloud, cfg: Config) -> str:
    fits = []
    for fit in result.per_group:
        if fit is None:
            fits.append(None)
        else:
            fits.append({
                "centroid": [float(v) for v in fit.centroid],
                "axis": [float(v) for v in fit.axis],
                "std": fit.std,
                "eccentricity": fit.eccentricity,
                "extent": fit.extent,
            })
    nodes = []
    for node in cloud.nodes:
        nodes.append({
            "id": node.id,
            "loc": [float(v) for v in node.loc],
            "intensity": node.intensity,
            "dir": None if node.dir is None else [float(v) for v in node.dir],
        })
    doc = {
        "params": cfg.echo(),
        "n": len(cloud),
        "dim": cloud.dim,
        "groups": result.groups,
        "outliers": result.outliers,
        "perGroup": fits,
        "forced": result.forced,
        "nodes": nodes,
        "tree": None if result.tree is None else result.tree.to_dict(),
    }
    return json.dumps(doc, indent=2)


def cmd_extract(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    img = read_image(args.image)
    cloud = extract_nodes(img, cfg.pipeline)
    write_cloud_csv(args.out, cloud)
    if not args.quiet:
        log.info("extracted %d nodes from %s", len(cloud), args.image)
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    cloud, _ = read_cloud_csv(args.cloud)
    if args.image:
        if cloud.dim != 2:
            raise InputError("an image can only accompany a 2-D cloud")
        img = read_image(args.image)
        nodes = []
        for node in cloud.nodes:
            inten = node.intensity
            if inten is None:
                # CSVs without intensities can still drive the intensity
                # weighting: sample the image at the node location.
                inten = float(np.clip(bilinear_sample(img, node.loc[0], node.loc[1]), 0.0, 1.0))
            nodes.append(Node(id=node.id, loc=node.loc, intensity=inten))
        cloud = PointCloud(nodes, cloud.dim, image=img)
    result = lcuts(cloud, cfg.graph, cfg.voting, cfg.limits)
    if args.dump_adjacency:
        with_dirs = assign_all_directions(cloud, cfg.voting)
        write_adjacency_csv(args.dump_adjacency, build_adjacency(with_dirs, cfg.graph))
    Path(args.out).write_text(_result_json(result, cloud, cfg), encoding="utf-8")
    if not args.quiet:
        log.info("clustered %d nodes into %d groups (%d outliers)",
                 len(cloud), len(result.groups), len(result.outliers))
    return 0


def _read_result_json(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: cannot read cluster JSON: {exc}") from exc
    for key in ("groups", "outliers"):
        if key not in doc:
            raise InputError(f"{path}: cluster JSON lacks the {key!r} field")
    return doc


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    doc = _read_result_json(args.pred)
    pred = [set(g) for g in doc["groups"]] + [{int(o)} for o in doc["outliers"]]
    _, truth = read_cloud_csv(args.truth)
    if truth is None:
        raise InputError(f"{args.truth}: truth CSV must carry a group column")
    try:
        report = evaluate(pred, truth, cfg.overlap_frac)
    except InputError as exc:
        raise InputError(f"prediction/truth mismatch: {exc}") from exc
    Path(args.out).write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    if not args.quiet:
        print(f"gacc={report.gacc} cacc={report.cacc}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = read_synth_spec(args.spec)
    cloud, groups = generate_cloud(spec)
    prefix = Path(args.out_prefix)
    write_cloud_csv(prefix.with_suffix(".csv"), cloud, groups)
    if spec.dim == 2:
        img, _, _ = generate_image(spec)
        write_pgm(prefix.with_suffix(".pgm"), img)
    if not args.quiet:
        log.info("generated %d nodes across %d rods", len(cloud), spec.n_rods)
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    src = str(args.input)
    if src.lower().endswith(".json"):
        doc = _read_result_json(src)
        if "nodes" not in doc:
            raise InputError(f"{src}: cluster JSON lacks node locations")
        locs = np.array([n["loc"] for n in doc["nodes"]], dtype=np.float64)
        groups = [list(map(int, g)) for g in doc["groups"]]
        outliers = [int(o) for o in doc["outliers"]]
        fits = doc.get("perGroup")
    else:
        cloud, truth = read_cloud_csv(src)
        locs = cloud.locs()
        if truth is not None:
            groups = [sorted(g) for g in truth]
        else:
            groups = [list(range(len(cloud)))] if len(cloud) else []
        outliers = []
        fits = None
    svg = render_svg(locs, groups, outliers, fits)
    write_svg(args.out, svg)
    if not args.quiet:
        log.info("wrote %s", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcuts",
        description="Cluster point clouds into collinear groups by recursive normalized cuts.")
    parser.add_argument("--config", help="flat key=value parameter file")
    parser.add_argument("--quiet", action="store_true", help="suppress progress output")
    parser.add_argument("--dump-adjacency", metavar="PATH",
                        help="write the affinity matrix CSV (cluster command)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="detect ridge nodes in an image")
    p.add_argument("image", help="input PGM or CSV-grid image")
    p.add_argument("out", help="output cloud CSV")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("cluster", help="group a point cloud")
    p.add_argument("cloud", help="input cloud CSV")
    p.add_argument("out", help="output JSON")
    p.add_argument("--image", help="raster to sample for intensity weighting")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="score a clustering against ground truth")
    p.add_argument("pred", help="cluster JSON")
    p.add_argument("truth", help="truth cloud CSV with a group column")
    p.add_argument("out", help="output metrics JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic benchmark")
    p.add_argument("spec", help="generator spec (flat key=value)")
    p.add_argument("out_prefix", help="output path prefix")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("render", help="draw a cloud or clustering as SVG")
    p.add_argument("input", help="cloud CSV or cluster JSON")
    p.add_argument("out", help="output SVG")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except LcutsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
