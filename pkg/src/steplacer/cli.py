"""Command-line harness: author profiles, place steps, run seed sweeps.

Exit codes: 0 success, 2 bad input or I/O, 3 step without a key object,
4 key object absent from the spatial profile.  Outputs depend only on the
inputs and seeds, never on the clock or environment.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from pathlib import Path
from typing import Optional

from .context import FrameWindow, read_trace
from .costs import (
    CostWeights,
    LabelGeometry,
    PlacementContext,
    cost_breakdown,
    occlusion_map,
    total_cost,
)
from .document import (
    KITCHEN_VOCABULARY,
    DocumentError,
    apply_predictions,
    author_profile,
    load_vocabulary,
    read_document_profile,
    read_predictions_tsv,
    write_document_profile,
)
from .importance import export_maps
from .optimizer import AnnealingConfig, export_trace_csv, greedy_search, simulated_annealing
from .spatial import read_spatial_profile

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNASSIGNED = 3
EXIT_NO_KEY_OBJECT = 4


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its keys")
    p.add_argument("--spatial", help="spatial profile JSON")
    p.add_argument("--doc", help="document profile JSON")
    p.add_argument("--trace", help="context trace JSONL")
    p.add_argument("--step", help="instruction step id")
    p.add_argument("--n-frames", type=int, help="window size in frames (default 90)")
    p.add_argument("--cursor", type=int, help="index of the window's final frame (default last)")
    p.add_argument("--t1", type=float, help="initial annealing temperature (default 100)")
    p.add_argument("--i-max", type=int, help="annealing iterations (default 200)")
    p.add_argument("--lambda-v", type=float, help="visibility weight (default 0.24)")
    p.add_argument("--lambda-r", type=float, help="readability weight (default 0.24)")
    p.add_argument("--lambda-ha", type=float, help="hand angle weight (default 0.24)")
    p.add_argument("--lambda-p", type=float, help="preference weight (default 0.28)")
    p.add_argument("--label-w", type=float, help="label width in meters (default 0.30)")
    p.add_argument("--label-h", type=float, help="label height in meters (default 0.12)")
    p.add_argument("--dump-maps", action="store_true", default=None,
                   help="write importance and occlusion maps as PGM/CSV")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steplacer")
    sub = parser.add_subparsers(dest="command", required=True)

    author = sub.add_parser("author", help="turn instruction text into a document profile")
    author.add_argument("--doc", required=True, help="plain-text instruction document")
    author.add_argument("--mode", choices=("paragraph", "sentence"), default="paragraph")
    author.add_argument("--vocab", help="vocabulary JSON (default: built-in kitchen labels)")
    author.add_argument("--available", help="comma-separated available key objects")
    author.add_argument("--predictions", help="ranked predictions TSV from a classifier")
    author.add_argument("--title", help="profile title (default: document file stem)")
    author.add_argument("--out", required=True, help="output document profile JSON")

    place = sub.add_parser("place", help="compute the optimal placement of one step")
    _add_scenario_flags(place)
    place.add_argument("--seed", type=int, help="annealing seed (default 0)")

    sweep = sub.add_parser("sweep", help="greedy baseline plus one annealing run per seed")
    _add_scenario_flags(sweep)
    sweep.add_argument("--seeds", help="comma-separated annealing seeds")
    return parser


class _Scenario:
    """Flags merged over an optional config file, with defaults applied."""

    def __init__(self, args: argparse.Namespace):
        config = {}
        if args.config:
            config = json.loads(Path(args.config).read_text())

        def pick(name: str, default=None):
            value = getattr(args, name, None)
            if value is not None:
                return value
            return config.get(name, default)

        self.spatial = pick("spatial")
        self.doc = pick("doc")
        self.trace = pick("trace")
        self.step = pick("step")
        self.n_frames = int(pick("n_frames", 90))
        self.cursor = pick("cursor")
        self.seed = int(pick("seed", 0))
        self.seeds = pick("seeds")
        self.t1 = float(pick("t1", 100.0))
        self.i_max = int(pick("i_max", 200))
        self.weights = CostWeights(
            visibility=float(pick("lambda_v", 0.24)),
            readability=float(pick("lambda_r", 0.24)),
            hand_angle=float(pick("lambda_ha", 0.24)),
            preference=float(pick("lambda_p", 0.28)),
        )
        self.label = LabelGeometry(
            width_m=float(pick("label_w", 0.30)), height_m=float(pick("label_h", 0.12))
        )
        self.dump_maps = bool(pick("dump_maps", False))
        self.out = pick("out")
        for name in ("spatial", "doc", "trace", "step", "out"):
            if getattr(self, name) is None:
                raise DocumentError(f"missing required option --{name.replace('_', '-')}")
        if self.n_frames < 2:
            raise DocumentError("--n-frames must be at least 2")


def _load_scenario(scn: _Scenario):
    spatial = read_spatial_profile(scn.spatial)
    doc = read_document_profile(scn.doc)
    frames = read_trace(scn.trace)
    step = doc.step(scn.step)
    if step.key_object is None:
        raise _Unassigned(scn.step)
    try:
        key_object = spatial.key_object(step.key_object)
    except KeyError:
        raise _MissingKeyObject(step.key_object)
    cursor = scn.cursor if scn.cursor is not None else len(frames) - 1
    if cursor < 0:
        cursor += len(frames)
    if not 0 <= cursor < len(frames):
        raise DocumentError(f"cursor {scn.cursor} outside trace of {len(frames)} frames")
    start = cursor + 1 - scn.n_frames
    if start < 0:
        raise DocumentError(
            f"window of {scn.n_frames} frames does not fit before cursor {cursor}"
        )
    window = FrameWindow(frames[start : cursor + 1])
    ctx = PlacementContext.build(key_object, window, label=scn.label, p_pref=step.p_pref)
    return step, key_object, ctx, cursor


class _Unassigned(Exception):
    pass


class _MissingKeyObject(Exception):
    pass


def cmd_author(args: argparse.Namespace) -> int:
    path = Path(args.doc)
    try:
        text = path.read_text()
    except OSError as exc:
        return _fail(f"cannot read document: {exc}", EXIT_INPUT)
    vocab = KITCHEN_VOCABULARY
    if args.vocab:
        vocab = load_vocabulary(args.vocab)
    available = None
    if args.available:
        available = [a.strip() for a in args.available.split(",") if a.strip()]
    title = args.title or path.stem
    try:
        profile = author_profile(title, text, vocab=vocab, mode=args.mode, available=available)
        if args.predictions:
            profile = apply_predictions(profile, read_predictions_tsv(args.predictions))
    except DocumentError as exc:
        return _fail(str(exc), EXIT_INPUT)
    write_document_profile(profile, args.out)
    print(f"{'id':<6} {'key object':<14} {'source':<10} {'conf':>5}  text")
    for s in profile.steps:
        label = s.key_object or "-"
        snippet = s.text if len(s.text) <= 50 else s.text[:47] + "..."
        print(f"{s.id:<6} {label:<14} {s.source:<10} {s.confidence:>5.2f}  {snippet}")
    print(f"wrote {len(profile.steps)} steps to {args.out}")
    return EXIT_OK


def _run_scenario(args: argparse.Namespace):
    scn = _Scenario(args)
    step, key_object, ctx, cursor = _load_scenario(scn)
    return scn, step, key_object, ctx, cursor


def cmd_place(args: argparse.Namespace) -> int:
    try:
        scn, step, key_object, ctx, cursor = _run_scenario(args)
    except _Unassigned as exc:
        return _fail(f"step {exc.args[0]!r} has no key object assigned", EXIT_UNASSIGNED)
    except _MissingKeyObject as exc:
        return _fail(f"key object {exc.args[0]!r} not in spatial profile", EXIT_NO_KEY_OBJECT)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)

    cost_fn = lambda a: total_cost(a, ctx, scn.weights)
    cfg = AnnealingConfig(t1=scn.t1, i_max=scn.i_max, seed=scn.seed)
    result = simulated_annealing(key_object, cost_fn, cfg)
    best = ctx.finalize(result.best)

    out = Path(scn.out)
    out.mkdir(parents=True, exist_ok=True)
    export_trace_csv(result, out / "search_trace.csv")
    if scn.dump_maps:
        export_maps(ctx.importance, out, "importance")
        occlusion = occlusion_map(best, ctx.label, ctx.eye, ctx.key_object)
        export_maps({sid: grid.astype(float) for sid, grid in occlusion.items()}, out, "occlusion")

    report = {
        "step": step.id,
        "key_object": key_object.name,
        "placement": {
            "surface": best.surface_id,
            "r": best.r,
            "c": best.c,
            "position": list(best.position.as_tuple()),
            "rotation": {
                "w": best.rotation.w,
                "x": best.rotation.x,
                "y": best.rotation.y,
                "z": best.rotation.z,
            },
        },
        "costs": cost_breakdown(result.best, ctx, scn.weights),
        "best_cost": result.best_cost,
        "evaluations": result.evaluations,
        "iterations": scn.i_max,
        "config": {
            "seed": scn.seed,
            "t1": scn.t1,
            "i_max": scn.i_max,
            "n_frames": scn.n_frames,
            "cursor": cursor,
            "lambda_v": scn.weights.visibility,
            "lambda_r": scn.weights.readability,
            "lambda_ha": scn.weights.hand_angle,
            "lambda_p": scn.weights.preference,
            "label_w": scn.label.width_m,
            "label_h": scn.label.height_m,
        },
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(
        f"step {step.id} on {key_object.name}: surface {best.surface_id} "
        f"cell ({best.r}, {best.c}) cost {result.best_cost:.6f} "
        f"after {result.evaluations} evaluations"
    )
    print(f"report written to {out / 'report.json'}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        scn, step, key_object, ctx, cursor = _run_scenario(args)
    except _Unassigned as exc:
        return _fail(f"step {exc.args[0]!r} has no key object assigned", EXIT_UNASSIGNED)
    except _MissingKeyObject as exc:
        return _fail(f"key object {exc.args[0]!r} not in spatial profile", EXIT_NO_KEY_OBJECT)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_INPUT)
    if not scn.seeds:
        return _fail("sweep needs --seeds", EXIT_INPUT)
    try:
        if isinstance(scn.seeds, list):
            seeds = [int(s) for s in scn.seeds]
        else:
            seeds = [int(s) for s in str(scn.seeds).split(",") if s.strip()]
    except (TypeError, ValueError) as exc:
        return _fail(f"bad seed list: {exc}", EXIT_INPUT)
    if not seeds:
        return _fail("empty seed list", EXIT_INPUT)

    cost_fn = lambda a: total_cost(a, ctx, scn.weights)
    baseline = greedy_search(key_object, cost_fn)

    out = Path(scn.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        ["greedy", "", baseline.evaluations, repr(baseline.best_cost), 1,
         baseline.evaluations_to_reach(baseline.best_cost)]
    ]
    hits = 0
    evals_to_opt = []
    for seed in seeds:
        cfg = AnnealingConfig(t1=scn.t1, i_max=scn.i_max, seed=seed)
        result = simulated_annealing(key_object, cost_fn, cfg)
        hit = abs(result.best_cost - baseline.best_cost) <= 1e-9
        reach = result.evaluations_to_reach(baseline.best_cost)
        if hit:
            hits += 1
            evals_to_opt.append(reach)
        rows.append(
            ["annealing", seed, result.evaluations, repr(result.best_cost), int(hit),
             reach if reach is not None else ""]
        )
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method", "seed", "evaluations", "best_cost", "hit_optimum", "evals_to_optimum"]
        )
        writer.writerows(rows)
    print(f"greedy: {baseline.evaluations} evaluations, best cost {baseline.best_cost:.6f}")
    print(f"annealing: {hits}/{len(seeds)} seeds reached the greedy optimum")
    if evals_to_opt:
        print(f"median evaluations to optimum: {statistics.median(evals_to_opt):.0f}")
    print(f"sweep written to {out / 'sweep.csv'}")
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "author":
        return cmd_author(args)
    if args.command == "place":
        return cmd_place(args)
    if args.command == "sweep":
        return cmd_sweep(args)
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
