"""Command-line surface over the full pipeline.

Subcommands: ``generate`` (synthetic or SI task datasets), ``transform``
(datasets to filtration surfaces), ``evaluate`` (cross-validated random
forest), ``predict`` (saved model on a surface directory), and ``bench``
(the scaling harness).  Every command is deterministic given ``--seed``;
``--threads`` affects wall time only.  Set ``FILTSURF_LOG`` to one of
error/warn/info/debug to control diagnostics.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .filtration import DescriptorConfig, curve_to_csv, snapshot_curve
from .forest import ForestConfig, cross_validate, load_model, predict_many, save_model, train
from .graphs import Dataset, DatasetError, load_dataset, save_dataset
from .surface import (
    FeatureMatrix,
    SharedWeightIndex,
    assemble_surface_from_curves,
    build_feature_matrix,
    build_shared_index,
    format_surface,
    FiltrationSurface,
    load_curves,
    load_index,
    save_index,
)
from .synth import SiConfig, SynthConfig, bfs_subgraphs, build_task, generate_base_snapshot, generate_synthetic
from .weights import WeightFunctionConfig
from .parallel import parallel_map

log = logging.getLogger(__name__)

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class BenchRecord:
    """One scaling measurement; byte counts come from the files on disk."""

    n_graphs: int
    construction_seconds: float
    train_seconds: float
    inference_seconds: float
    surface_bytes: int
    gram_matrix_bytes: int


def _configure_logging() -> None:
    name = os.environ.get("FILTSURF_LOG", "warn").lower()
    logging.basicConfig(
        level=_LOG_LEVELS.get(name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


# ---------------------------------------------------------------------------
# transform pipeline


def _graph_curves(args):
    dg, weight_cfg, desc = args
    return [snapshot_curve(snap, weight_cfg, desc) for snap in dg.snapshots]


def run_transform(ds: Dataset, out_dir: Path, weight_cfg: WeightFunctionConfig,
                  desc: DescriptorConfig, threads: int = 1,
                  dump_curves: Path | None = None) -> dict:
    """Write surfaces/<id>.fsurf, index.json and manifest.json; returns the manifest."""
    curve_lists = parallel_map(_graph_curves, [(dg, weight_cfg, desc) for dg in ds.graphs], threads)
    idx = build_shared_index([c for curves in curve_lists for c in curves])
    n_std = max(len(dg) for dg in ds.graphs)

    surf_dir = out_dir / "surfaces"
    surf_dir.mkdir(parents=True, exist_ok=True)
    for dg, curves in zip(ds.graphs, curve_lists):
        surf = assemble_surface_from_curves(dg.graph_id, curves, idx, n_std)
        (surf_dir / f"{dg.graph_id}.fsurf").write_text(format_surface(surf), encoding="utf-8")
        if dump_curves is not None:
            dump_curves.mkdir(parents=True, exist_ok=True)
            for t, curve in enumerate(curves):
                (dump_curves / f"{dg.graph_id}_t{t}.csv").write_text(
                    curve_to_csv(curve), encoding="utf-8"
                )
    save_index(out_dir / "index.json", idx)
    manifest = {
        "format_version": MANIFEST_VERSION,
        "weight": weight_cfg.kind,
        "ricci_alpha": weight_cfg.ricci_alpha,
        "hks_t": weight_cfg.hks_t,
        "descriptor": desc.kind,
        "include_isolated": desc.include_isolated,
        "label_alphabet": list(desc.label_alphabet),
        "n_std": n_std,
        "m": idx.m,
        "d": desc.dim,
        "classes": {dg.graph_id: dg.label for dg in ds.graphs},
        "graphs": [dg.graph_id for dg in ds.graphs],
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def load_surfaces(surf_root: Path) -> tuple[dict, SharedWeightIndex, list[FiltrationSurface]]:
    manifest = json.loads((surf_root / "manifest.json").read_text(encoding="utf-8"))
    if manifest.get("format_version") != MANIFEST_VERSION:
        raise DatasetError("unsupported manifest version", path=surf_root / "manifest.json")
    idx = load_index(surf_root / "index.json")
    surfaces = []
    for gid in manifest["graphs"]:
        _, _, curves = load_curves(surf_root / "surfaces" / f"{gid}.fsurf")
        surfaces.append(assemble_surface_from_curves(gid, curves, idx, manifest["n_std"]))
    return manifest, idx, surfaces


def load_features(surf_root: Path) -> tuple[dict, FeatureMatrix]:
    manifest, _, surfaces = load_surfaces(surf_root)
    classes = {gid: int(c) for gid, c in manifest["classes"].items()}
    return manifest, build_feature_matrix(surfaces, classes)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args, parser) -> int:
    try:
        if args.task == "synthetic":
            ds = generate_synthetic(SynthConfig(
                n_graphs=args.n,
                seed_nodes=args.seed_nodes,
                ba_m=args.ba_m,
                timesteps=args.timesteps,
                nodes_per_step=args.nodes_per_step,
                seed=args.seed,
            ))
        else:
            task = 1 if args.task == "si1" else 2
            base_seq, task_seq = np.random.SeedSequence(args.seed).spawn(2)
            base = generate_base_snapshot(
                n_nodes=args.n,
                ba_m=args.ba_m,
                weight_range=(1, 5),
                seed=int(base_seq.generate_state(1, np.uint64)[0]),
            )
            subgraphs = bfs_subgraphs(base, args.size_cap)
            p_params = (args.p,) if task == 1 else (args.p0, args.p1)
            ds = build_task(
                subgraphs, task, p_params,
                seed=int(task_seq.generate_state(1, np.uint64)[0]),
                stop_fraction=args.stop_fraction,
            )
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    save_dataset(ds, args.out)
    print(f"wrote {len(ds)} dynamic graphs to {args.out}")
    return 0


def cmd_transform(args, parser) -> int:
    try:
        ds = load_dataset(args.data)
        weight_cfg = WeightFunctionConfig(
            kind=args.weight, ricci_alpha=args.ricci_alpha, hks_t=args.hks_t
        )
        desc = DescriptorConfig(
            kind=args.descriptor,
            label_alphabet=ds.label_alphabet if args.descriptor == "label-histogram" else (),
            include_isolated=args.include_isolated,
        )
        manifest = run_transform(
            ds, Path(args.out), weight_cfg, desc, threads=args.threads,
            dump_curves=Path(args.dump_curves) if args.dump_curves else None,
        )
    except (DatasetError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {len(manifest['graphs'])} surfaces to {args.out} "
        f"(n_std={manifest['n_std']}, m={manifest['m']}, d={manifest['d']})"
    )
    return 0


def cmd_evaluate(args, parser) -> int:
    try:
        cfg = ForestConfig(n_trees=args.trees, seed=args.seed)
        if args.folds < 2:
            raise ValueError("folds must be at least 2")
        if args.reps < 1:
            raise ValueError("reps must be at least 1")
        manifest, features = load_features(Path(args.surfaces))
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = cross_validate(
            features, cfg, folds=args.folds, repetitions=args.reps, threads=args.threads
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    payload = report.to_json_dict()
    payload.update({
        "feature_dim": int(features.X.shape[1]),
        "n_graphs": int(features.X.shape[0]),
        "trees": args.trees,
        "repetitions": args.reps,
        "folds_per_repetition": args.folds,
        "seed": args.seed,
        "std_convention": "population",
    })
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    # accuracy in percent, population std, matching the fold table
    print(f"accuracy: {report.summary()}")
    if args.save_model:
        model = train(features, cfg, threads=args.threads)
        save_model(model, args.save_model)
        print(f"model saved to {args.save_model}")
    return 0


def cmd_predict(args, parser) -> int:
    try:
        model = load_model(args.model)
        manifest, features = load_features(Path(args.surfaces))
        pred = predict_many(model, features.X)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    predictions = {gid: int(p) for gid, p in zip(features.graph_ids, pred)}
    payload = {"format_version": 1, "predictions": predictions}
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    return 0


def _bench_one(n: int, seed: int, trees: int, threads: int, workdir: Path) -> BenchRecord:
    data_dir = workdir / f"n{n:06d}" / "data"
    surf_root = workdir / f"n{n:06d}" / "surfaces"
    ds = generate_synthetic(SynthConfig(n_graphs=n, seed=seed))
    save_dataset(ds, data_dir)

    t0 = time.monotonic()
    ds = load_dataset(data_dir)
    desc = DescriptorConfig(kind="label-histogram", label_alphabet=ds.label_alphabet)
    run_transform(ds, surf_root, WeightFunctionConfig(kind="native"), desc, threads=threads)
    construction = time.monotonic() - t0

    surface_bytes = sum(
        p.stat().st_size for p in sorted((surf_root / "surfaces").glob("*.fsurf"))
    )

    _, features = load_features(surf_root)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    perm = rng.permutation(features.X.shape[0])
    n_test = max(1, math.ceil(0.1 * features.X.shape[0]))
    test_idx, train_idx = perm[:n_test], perm[n_test:]
    train_features = FeatureMatrix(
        X=features.X[train_idx],
        y=features.y[train_idx],
        graph_ids=tuple(features.graph_ids[i] for i in train_idx),
    )

    t0 = time.monotonic()
    model = train(train_features, ForestConfig(n_trees=trees, seed=seed), threads=threads)
    train_seconds = time.monotonic() - t0

    t0 = time.monotonic()
    predict_many(model, features.X[test_idx])
    inference_seconds = time.monotonic() - t0

    return BenchRecord(
        n_graphs=n,
        construction_seconds=round(construction, 3),
        train_seconds=round(train_seconds, 3),
        inference_seconds=round(inference_seconds, 3),
        surface_bytes=surface_bytes,
        gram_matrix_bytes=8 * n * n,  # hypothetical float64 Gram matrix, computed analytically
    )


def cmd_bench(args, parser) -> int:
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok]
        if not sizes or any(n < 2 for n in sizes):
            raise ValueError(f"invalid --sizes {args.sizes!r}")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    workdir = Path(args.workdir) if args.workdir else Path(args.out).parent / "bench-work"
    records = []
    for n in sizes:
        rec = _bench_one(n, args.seed, args.trees, args.threads, workdir)
        records.append(rec)
        log.info("bench n=%d: %s", n, rec)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "n_graphs", "construction_seconds", "train_seconds",
            "inference_seconds", "surface_bytes", "gram_matrix_bytes",
        ])
        for rec in records:
            writer.writerow([
                rec.n_graphs, rec.construction_seconds, rec.train_seconds,
                rec.inference_seconds, rec.surface_bytes, rec.gram_matrix_bytes,
            ])
    print(f"wrote {len(records)} benchmark rows to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filtsurf",
        description="Classify dynamic graphs with filtration surfaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master RNG seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker processes; changes wall time only")

    p = sub.add_parser("generate", help="generate a dataset directory")
    common(p)
    p.add_argument("--task", choices=["synthetic", "si1", "si2"], default="synthetic")
    p.add_argument("--n", type=int, required=True, help="number of dynamic graphs")
    p.add_argument("--out", required=True, help="dataset directory to write")
    p.add_argument("--seed-nodes", type=int, default=10, help="initial graph size")
    p.add_argument("--ba-m", type=int, default=2, help="edges per attached node")
    p.add_argument("--timesteps", type=int, default=10)
    p.add_argument("--nodes-per-step", type=int, default=5)
    p.add_argument("--size-cap", type=int, default=50, help="BFS subgraph size cap (SI tasks)")
    p.add_argument("--p", type=float, default=0.5, help="SI infection probability (si1)")
    p.add_argument("--p0", type=float, default=0.2, help="class-0 infection probability (si2)")
    p.add_argument("--p1", type=float, default=0.8, help="class-1 infection probability (si2)")
    p.add_argument("--stop-fraction", type=float, default=0.5)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("transform", help="build filtration surfaces from a dataset")
    common(p)
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--out", required=True, help="surface directory to write")
    p.add_argument("--weight", choices=["native", "max-degree", "ricci", "hks"],
                   default="native")
    p.add_argument("--ricci-alpha", type=float, default=0.5)
    p.add_argument("--hks-t", type=float, default=10.0)
    p.add_argument("--descriptor", choices=["label-histogram", "component-count"],
                   default="label-histogram")
    p.add_argument("--include-isolated", action="store_true",
                   help="count isolated nodes from the first threshold on")
    p.add_argument("--dump-curves", default=None, help="write per-curve CSV dumps here")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("evaluate", help="cross-validate a random forest on surfaces")
    common(p)
    p.add_argument("--surfaces", required=True, help="surface directory from transform")
    p.add_argument("--trees", type=int, default=1000)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--out", default=None, help="write the report JSON here")
    p.add_argument("--save-model", default=None, help="train on all data and save the model")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="predict classes with a saved model")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--surfaces", required=True)
    p.add_argument("--out", default=None, help="write predictions JSON here (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="scaling benchmark over dataset sizes")
    common(p)
    p.add_argument("--sizes", required=True, help="comma-separated dataset sizes, e.g. 100,1000")
    p.add_argument("--out", required=True, help="CSV file to write")
    p.add_argument("--trees", type=int, default=100,
                   help="forest size for the timed training step")
    p.add_argument("--workdir", default=None,
                   help="where to place generated datasets and surfaces")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
