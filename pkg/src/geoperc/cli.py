"""Command-line interface: generate, fail, cascade, sweep, theory, estimate.

Every output document embeds the tool version, the effective parameters, and
the seed, which is enough to re-run the command exactly. When --seed is
omitted a seed is drawn from OS entropy and echoed both to stderr and into the
output metadata.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .cascade import parse_distribution, run_cascade, sample_thresholds
from .experiments import (
    ExperimentConfig,
    estimate_lambda_c,
    estimate_qc,
    run_cascade_trials,
    run_sweep,
)
from .failures import apply_failures, parse_rule
from .geometry import OPEN_BOX, Region, generate_poisson, generate_uniform
from .graph import build_graph
from .io import (
    SchemaError,
    cascade_rows,
    load_graph,
    save_graph,
    sweep_rows,
    to_csv,
)
from .seeding import STREAM_SEED_NODE, generator_from_seed, substream
from .theory import (
    CriticalConstants,
    SeriesControl,
    block_count_cap,
    circuit_count_bound,
    critical_phi,
    critical_q,
    no_cascade_condition,
    no_infinite_component_nondecreasing,
    no_infinite_component_nonincreasing,
)


def _fresh_seed() -> int:
    seed = int.from_bytes(os.urandom(8), "little")
    print(f"seed drawn from entropy: {seed}", file=sys.stderr)
    return seed


def _document(command: str, params: dict, seed: int | None, payload: dict) -> dict:
    return {
        "version": __version__,
        "command": command,
        "params": params,
        "seed": seed,
        **payload,
    }


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_table(doc_meta: dict, header, rows, out: str | None, fmt: str, payload_key: str,
                records: list[dict]) -> None:
    if fmt == "csv":
        text = to_csv(header, rows)
        if out:
            with open(out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit({**doc_meta, payload_key: records}, out)


def _cmd_generate(args) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    region = Region(args.width, args.height, args.boundary)
    if (args.n is None) == (args.lam is None):
        raise ValueError("exactly one of --n and --lambda is required")
    if args.n is not None:
        points = generate_uniform(args.n, region, seed)
    else:
        points = generate_poisson(args.lam, region, seed)
    graph = build_graph(points, args.radius)
    params = {
        "n": args.n, "lambda": args.lam, "width": args.width, "height": args.height,
        "boundary": args.boundary, "radius": args.radius,
    }
    meta = _document("generate", params, seed, {})
    if args.out:
        save_graph(graph, args.out, meta=meta)
        print(json.dumps({**meta, "nodes": len(graph), "edges": graph.edge_count,
                          "out": args.out}))
    else:
        from .io import graph_to_dict

        print(json.dumps(graph_to_dict(graph, meta=meta)))
    return 0


def _cmd_fail(args) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    graph = load_graph(args.graph)
    rule = parse_rule(args.rule)
    outcome = apply_failures(graph, rule, seed)
    params = {"graph": args.graph, "rule": args.rule}
    doc = _document(
        "fail", params, seed,
        {
            "nodes": len(graph),
            "alive_count": int(outcome.alive.sum()),
            "alive": outcome.alive.tolist(),
        },
    )
    _emit(doc, args.out)
    return 0


def _cmd_cascade(args) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    graph = load_graph(args.graph)
    dist = parse_distribution(args.dist)
    if len(graph) == 0:
        raise ValueError("cannot run a cascade on an empty graph")
    thresholds = sample_thresholds(graph, dist, seed)
    if args.seed_node is not None:
        seed_node = args.seed_node
    else:
        gen = generator_from_seed(substream(seed, STREAM_SEED_NODE))
        seed_node = int(gen.integers(len(graph)))
    state = run_cascade(graph, thresholds, seed_node)
    params = {"graph": args.graph, "dist": args.dist, "seed_node": args.seed_node}
    doc = _document("cascade", params, seed, state.to_dict())
    _emit(doc, args.out)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{args.config} is not valid JSON: {exc}") from exc
    config = ExperimentConfig.from_dict(doc)
    params = {"config": args.config}
    meta = _document("sweep", {**params, "effective_config": config.to_dict()},
                     config.base_seed, {})
    if config.kind == "cascade-trial":
        records = run_cascade_trials(config)
        header, rows = cascade_rows(records)
        _emit_table(meta, header, rows, args.out, args.format, "records",
                    [r.to_dict() for r in records])
    else:
        result = run_sweep(config)
        header, rows = sweep_rows(result.points)
        _emit_table(meta, header, rows, args.out, args.format, "points",
                    [{**p.params, "estimate": p.estimate, "stderr": p.stderr,
                      "trials": p.trials} for p in result.points])
    return 0


def _cmd_theory(args) -> int:
    constants = CriticalConstants(args.lambda_c)
    control = SeriesControl(tail_tolerance=args.tolerance)
    sub = args.theory_command
    if sub == "critical-q":
        value = critical_q(args.lam, constants)
        doc = {"condition": "critical-q", "lambda": args.lam,
               "lambda_c": constants.lambda_c, "q_c": value}
    elif sub == "critical-phi":
        value = critical_phi(args.lam)
        doc = {"condition": "critical-phi", "lambda": args.lam,
               "phi": "unbounded" if math.isinf(value) else int(value)}
    elif sub == "failure-condition":
        rule = parse_rule(args.rule)
        if rule.is_nondecreasing():
            res = no_infinite_component_nondecreasing(args.lam, rule, control)
            name = "no-infinite-component-nondecreasing"
        elif rule.is_nonincreasing():
            res = no_infinite_component_nonincreasing(args.lam, rule, control)
            name = "no-infinite-component-nonincreasing"
        else:
            raise ValueError(f"rule {args.rule!r} is neither non-decreasing nor non-increasing")
        doc = {"condition": name, "lambda": args.lam, "rule": args.rule,
               "lhs": res.lhs, "threshold": res.threshold, "relation": res.relation,
               "holds": res.holds}
    elif sub == "cascade-condition":
        dist = parse_distribution(args.dist)
        res = no_cascade_condition(args.lam, dist, control)
        doc = {"condition": "no-cascade", "lambda": args.lam, "dist": args.dist,
               "lhs": res.lhs, "threshold": res.threshold, "relation": res.relation,
               "holds": res.holds}
    elif sub == "block-cap":
        doc = {"condition": "block-cap", "lambda": args.lam, "d": args.d,
               "cap": block_count_cap(args.lam, args.d)}
    elif sub == "circuit-bound":
        doc = {"condition": "circuit-bound", "m": args.m,
               "bound": circuit_count_bound(args.m)}
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown theory subcommand {sub!r}")
    _emit(_document("theory", {"subcommand": sub}, None, doc), args.out)
    return 0


def _cmd_estimate(args) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    if args.estimate_command == "lambda-c":
        result = estimate_lambda_c(
            side=args.side, radius=args.radius, trials=args.trials, base_seed=seed,
            bracket=(args.bracket_low, args.bracket_high), target_width=args.width,
        )
        params = {"side": args.side, "radius": args.radius, "trials": args.trials,
                  "bracket": [args.bracket_low, args.bracket_high], "width": args.width}
        doc = _document("estimate lambda-c", params, seed, result.to_dict())
    else:
        result = estimate_qc(
            args.lam, side=args.side, radius=args.radius, trials=args.trials,
            base_seed=seed, target_width=args.width,
        )
        params = {"lambda": args.lam, "side": args.side, "radius": args.radius,
                  "trials": args.trials, "width": args.width}
        doc = _document("estimate qc", params, seed, result.to_dict())
    _emit(doc, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoperc",
        description="Resilience analysis of random geometric graphs",
    )
    parser.add_argument("--version", action="version", version=f"geoperc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a graph and write it as JSON")
    p.add_argument("--n", type=int, default=None, help="fixed point count")
    p.add_argument("--lambda", dest="lam", type=float, default=None,
                   help="Poisson intensity (points per unit area)")
    p.add_argument("--width", type=float, required=True)
    p.add_argument("--height", type=float, required=True)
    p.add_argument("--boundary", choices=["open-box", "torus"], default=OPEN_BOX)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("fail", help="apply a failure rule to a stored graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--rule", required=True,
                   help="indep:q | attack:phi | table:q0,q1,...;tail=t")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_fail)

    p = sub.add_parser("cascade", help="run a threshold cascade on a stored graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--dist", required=True, help="pieces:start,end,density;...")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--seed-node", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_cascade)

    p = sub.add_parser("sweep", help="run an experiment config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("theory", help="evaluate a closed-form condition")
    tsub = p.add_subparsers(dest="theory_command", required=True)
    for name in ("critical-q", "critical-phi", "failure-condition", "cascade-condition",
                 "block-cap", "circuit-bound"):
        tp = tsub.add_parser(name)
        if name != "circuit-bound":
            tp.add_argument("--lambda", dest="lam", type=float, required=True)
        if name == "failure-condition":
            tp.add_argument("--rule", required=True)
        if name == "cascade-condition":
            tp.add_argument("--dist", required=True)
        if name == "block-cap":
            tp.add_argument("--d", type=float, required=True)
        if name == "circuit-bound":
            tp.add_argument("--m", type=int, required=True)
        tp.add_argument("--lambda-c", dest="lambda_c", type=float, default=1.435)
        tp.add_argument("--tolerance", type=float, default=1e-12)
        tp.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("estimate", help="Monte Carlo estimation of critical points")
    esub = p.add_subparsers(dest="estimate_command", required=True)
    ep = esub.add_parser("lambda-c")
    ep.add_argument("--side", type=float, default=50.0)
    ep.add_argument("--radius", type=float, default=1.0)
    ep.add_argument("--trials", type=int, default=200)
    ep.add_argument("--bracket-low", type=float, default=1.0)
    ep.add_argument("--bracket-high", type=float, default=2.0)
    ep.add_argument("--width", type=float, default=0.02)
    ep.add_argument("--seed", type=int, default=None)
    ep.add_argument("--out", default=None)
    ep = esub.add_parser("qc")
    ep.add_argument("--lambda", dest="lam", type=float, required=True)
    ep.add_argument("--side", type=float, default=50.0)
    ep.add_argument("--radius", type=float, default=1.0)
    ep.add_argument("--trials", type=int, default=100)
    ep.add_argument("--width", type=float, default=0.02)
    ep.add_argument("--seed", type=int, default=None)
    ep.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_estimate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
