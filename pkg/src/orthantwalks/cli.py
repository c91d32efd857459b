"""Command-line surface.

Subcommands: analyze, sample, naive, verify, bench, export, hull.
Randomized commands take --seed; without it one is drawn and printed so
the run can be reproduced.  Exit codes: 0 success, 2 validation error,
3 attempts exhausted, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
import time

from . import _kernels, __version__
from .boltzmann import sample_in_window
from .errors import (
    AttemptsExhaustedError,
    DegenerateHullError,
    ParseError,
    WalksError,
)
from .exporters import (
    export_hull_obj,
    export_walks,
    load_model,
    read_walk_records,
    write_walk_records,
)
from .grammar import count_meanders_dp, format_grammar
from .hull import convex_hull_3d
from .pipeline import (
    assemble_pipeline,
    chi_square_endpoints,
    count_orthant_walks,
    endpoint_counts,
    endpoint_rmse,
    naive_sample,
    sample_orthant_walks,
)
from .rng import GENERATOR_NAME
from .stepsets import drift, stepset_digest


def _emit(doc: dict, out) -> None:
    json.dump(doc, out, indent=2, sort_keys=True)
    out.write("\n")


def _resolve_seed(args, options) -> int:
    if args.seed is not None:
        return args.seed
    if "seed" in options:
        return options["seed"]
    seed = secrets.randbits(32)
    print("seed: %d (drawn; pass --seed to reproduce)" % seed, file=sys.stderr)
    return seed


def _analysis_document(pipeline) -> dict:
    d = drift(pipeline.stepset)
    naive_base = pipeline.a_tau / pipeline.stepset.total_weight
    return {
        "digest": pipeline.digest,
        "steps": [[list(s), w] for s, w in pipeline.stepset.entries],
        "drift": list(d.as_tuple()),
        "drift_class": d.cls,
        "minimizer": list(pipeline.minimizer.as_tuple()),
        "s_min": pipeline.minimizer.s_min,
        "projection_vector": list(pipeline.vector.as_tuple()),
        "projection_branch": pipeline.vector.branch,
        "integer_projection": list(pipeline.integer_projection.as_tuple()),
        "denominator": pipeline.integer_projection.denominator,
        "rationalization_error": pipeline.integer_projection.max_abs_error,
        "stepset_1d": [
            {"atom": a.atom_id, "value": a.value, "weight": a.weight, "source": list(a.source)}
            for a in pipeline.stepset_1d.atoms
        ],
        "grammar": {
            "nonterminals": len(pipeline.grammar.nonterminals),
            "productions": pipeline.grammar.num_alternatives(),
        },
        "tau": pipeline.tau,
        "a_tau": pipeline.a_tau,
        "rho": pipeline.rho,
        "gf": {
            "x0": pipeline.gf.x0,
            "residual": pipeline.gf.residual,
            "values": pipeline.gf.values,
        },
        # naive yield shrinks like (A(tau)/total_weight)^n up to powers of n
        "naive_yield_base": naive_base,
        "rng": GENERATOR_NAME,
        "backend": _kernels.BACKEND,
    }


def cmd_analyze(args) -> int:
    stepset, options = load_model(args.model)
    pipeline = assemble_pipeline(stepset, max_den=options.get("max_den", args.max_den))
    doc = _analysis_document(pipeline)
    _emit(doc, sys.stdout)
    if args.grammar:
        print(format_grammar(pipeline.grammar), file=sys.stderr)
    return 0


def cmd_sample(args) -> int:
    stepset, options = load_model(args.model)
    seed = _resolve_seed(args, options)
    pipeline = assemble_pipeline(stepset, max_den=options.get("max_den", args.max_den))
    try:
        report = sample_orthant_walks(
            pipeline,
            args.min_len,
            args.max_len,
            args.count,
            max_attempts=args.max_attempts,
            seed=seed,
        )
    except AttemptsExhaustedError as exc:
        if args.out and exc.report is not None:
            write_walk_records(args.out, exc.report.walks, pipeline.digest, seed)
        summary = {"error": exc.code, "seed": seed, "counters": exc.report.counters()}
        _emit(summary, sys.stdout)
        return exc.exit_status
    if args.out:
        write_walk_records(args.out, report.walks, pipeline.digest, seed)
    summary = {
        "seed": seed,
        "counters": report.counters(),
        "wall_time": report.wall_time,
        "rng": GENERATOR_NAME,
        "backend": _kernels.BACKEND,
    }
    _emit(summary, sys.stdout)
    return 0


def cmd_naive(args) -> int:
    stepset, options = load_model(args.model)
    seed = _resolve_seed(args, options)
    digest = stepset_digest(stepset)
    try:
        report = naive_sample(
            stepset, args.len, args.count, max_attempts=args.max_attempts, seed=seed
        )
    except AttemptsExhaustedError as exc:
        if args.out and exc.report is not None:
            write_walk_records(args.out, exc.report.walks, digest, seed)
        _emit({"error": exc.code, "seed": seed, "counters": exc.report.counters()}, sys.stdout)
        return exc.exit_status
    if args.out:
        write_walk_records(args.out, report.walks, digest, seed)
    _emit(
        {
            "seed": seed,
            "counters": report.counters(),
            "wall_time": report.wall_time,
            "rng": GENERATOR_NAME,
            "backend": _kernels.BACKEND,
        },
        sys.stdout,
    )
    return 0


def cmd_verify(args) -> int:
    stepset, options = load_model(args.model)
    seed = _resolve_seed(args, options)
    pipeline = assemble_pipeline(stepset, max_den=options.get("max_den", args.max_den))
    exact = count_orthant_walks(stepset, args.length)[args.length]
    report = sample_orthant_walks(
        pipeline,
        args.length,
        args.length,
        args.samples,
        max_attempts=args.max_attempts,
        seed=seed,
        collect="endpoints",
    )
    counts = endpoint_counts(report.endpoints)
    total = sum(counts.values())
    freqs = {p: k / total for p, k in counts.items()}
    rmse = endpoint_rmse(freqs, exact)
    stat, p_value = chi_square_endpoints(counts, exact)
    _emit(
        {
            "seed": seed,
            "length": args.length,
            "samples": args.samples,
            "rmse": rmse,
            "chi_square": stat,
            "p_value": p_value,
            "counters": report.counters(),
            "wall_time": report.wall_time,
        },
        sys.stdout,
    )
    return 0


def cmd_bench(args) -> int:
    stepset, options = load_model(args.model)
    seed = _resolve_seed(args, options)
    pipeline = assemble_pipeline(stepset, max_den=options.get("max_den", args.max_den))
    rows = {}
    try:
        nrep = naive_sample(
            stepset, args.target_len, args.count, max_attempts=args.naive_cap, seed=seed
        )
        rows["naive"] = {
            "attempts": nrep.free_draws,
            "accepted": nrep.accepted,
            "wall_time": nrep.wall_time,
            "attempts_per_walk": nrep.free_draws / max(nrep.accepted, 1),
        }
    except AttemptsExhaustedError as exc:
        r = exc.report
        rows["naive"] = {
            "attempts": r.free_draws,
            "accepted": r.accepted,
            "wall_time": r.wall_time,
            "attempts_per_walk": None,
            "error": exc.code,
        }
    lo = max(0, args.target_len - args.window)
    hi = args.target_len + args.window
    try:
        brep = sample_orthant_walks(
            pipeline, lo, hi, args.count, max_attempts=args.max_attempts, seed=seed
        )
        rows["boltzmann"] = {
            "attempts": brep.free_draws,
            "accepted": brep.accepted,
            "wall_time": brep.wall_time,
            "attempts_per_walk": brep.free_draws / max(brep.accepted, 1),
        }
    except AttemptsExhaustedError as exc:
        r = exc.report
        rows["boltzmann"] = {
            "attempts": r.free_draws,
            "accepted": r.accepted,
            "wall_time": r.wall_time,
            "attempts_per_walk": None,
            "error": exc.code,
        }
    ratio = None
    if rows["naive"]["attempts_per_walk"] and rows["boltzmann"]["attempts_per_walk"]:
        ratio = rows["naive"]["attempts_per_walk"] / rows["boltzmann"]["attempts_per_walk"]
    _emit(
        {
            "seed": seed,
            "target_len": args.target_len,
            "window": [lo, hi],
            "engines": rows,
            "naive_over_boltzmann": ratio,
            "backend": _kernels.BACKEND,
        },
        sys.stdout,
    )
    return 0


def cmd_export(args) -> int:
    walks = read_walk_records(args.records)
    export_walks(walks, args.format, args.out)
    return 0


def cmd_hull(args) -> int:
    walks = read_walk_records(args.records)
    points = []
    for w in walks:
        pts = w.positions()
        points.append(pts[min(args.step, len(pts) - 1)])
    try:
        mesh = convex_hull_3d(points)
    except DegenerateHullError as exc:
        _emit({"degenerate": True, "points": [list(p) for p in exc.points]}, sys.stdout)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                json.dump({"degenerate": True, "points": [list(p) for p in exc.points]}, fh)
        return 0
    export_hull_obj(mesh, args.out)
    _emit({"vertices": len(mesh.vertices), "faces": len(mesh.faces)}, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthantwalks",
        description="Uniform sampling of weighted 3D lattice walks in the first orthant",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("model", help="model JSON file")
        p.add_argument("--max-den", type=int, default=8, dest="max_den")
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("analyze", help="run the setup phase and report it")
    add_model_flags(p)
    p.add_argument("--grammar", action="store_true", help="dump the grammar to stderr")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sample", help="Boltzmann pipeline sampler")
    add_model_flags(p)
    p.add_argument("--min-len", type=int, required=True, dest="min_len")
    p.add_argument("--max-len", type=int, required=True, dest="max_len")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=10**7, dest="max_attempts")
    p.add_argument("--out", default=None, help="walk records output path (NDJSON)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("naive", help="naive rejection sampler")
    add_model_flags(p)
    p.add_argument("--len", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=None, dest="max_attempts")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_naive)

    p = sub.add_parser("verify", help="endpoint distribution vs exact counts")
    add_model_flags(p)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--max-attempts", type=int, default=4 * 10**9, dest="max_attempts")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="naive vs Boltzmann comparison")
    add_model_flags(p)
    p.add_argument("--target-len", type=int, required=True, dest="target_len")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--window", type=int, default=0, help="half-width of the length window")
    p.add_argument("--naive-cap", type=int, default=10**6, dest="naive_cap")
    p.add_argument("--max-attempts", type=int, default=10**7, dest="max_attempts")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export", help="convert walk records to csv/ply/obj")
    p.add_argument("records")
    p.add_argument("--format", required=True, choices=["csv", "ply", "obj"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("hull", help="convex hull of simultaneous walk positions")
    p.add_argument("records")
    p.add_argument("--step", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hull)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AttemptsExhaustedError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return exc.exit_status
    except WalksError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
