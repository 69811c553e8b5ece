"""Command line entry point: ``edgepush {run,report,gen,truth}``."""
from __future__ import annotations

import argparse
import os
import shutil
import sys

from .bench import (ALGORITHMS, ExperimentConfig, bound_violations, bundled_graph_path,
                    decade_grid, env_int, graph_from_spec, rows_to_csv, run_experiment,
                    truth_iterations)
from .edgepush import DEFAULT_SCAN_FRACTION
from .generators import AffinityConfig, affinity_graph, motif_weight, unbalanced_star_graph
from .graph import load_edge_list, write_edge_list
from .oracle import ground_truth
from .unbalance import unbalance_report


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_run(args) -> int:
    grid = args.grid if args.grid else decade_grid(args.grid_start, args.grid_steps,
                                                   args.grid_factor)
    cfg = ExperimentConfig(graph=args.graph, algorithm=args.algorithm,
                           error_mode=args.error_mode, alpha=args.alpha, grid=grid,
                           queries=args.queries, source_mode=args.source_mode,
                           sources=args.sources, k=args.k, seed=args.seed,
                           scan_fraction=args.scan_fraction, push_theta=args.push_theta,
                           truth_iterations=args.truth_iterations, threads=args.threads)
    g = graph_from_spec(args.graph)
    rows = run_experiment(cfg, g)
    text = rows_to_csv(rows, args.output)
    if args.output is None:
        sys.stdout.write(text)
    bad = bound_violations(cfg, rows, g)
    if bad:
        print(f"warning: {len(bad)} rows exceed their error bound", file=sys.stderr)
        return 1
    return 0


def cmd_report(args) -> int:
    g = graph_from_spec(args.graph)
    rep = unbalance_report(g)
    if not args.per_node:
        rep.per_node_cos2 = []
    text = rep.to_json()
    if args.output:
        with open(args.output, "w") as f:
            f.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_gen(args) -> int:
    if args.kind == "star":
        g = unbalanced_star_graph(args.n, args.b, args.tail)
    elif args.kind == "affinity":
        g = affinity_graph(AffinityConfig(n_points=args.n, dim=args.dim,
                                          coord_var=args.coord_var,
                                          bandwidth_mode=args.bandwidth, c=args.c,
                                          d2=args.d2, rng_seed=args.seed))
    elif args.kind == "motif":
        g = motif_weight(load_edge_list(args.input or bundled_graph_path()))
    else:
        shutil.copyfile(bundled_graph_path(), args.output)
        return 0
    write_edge_list(g, args.output)
    print(f"wrote {args.output}: n={g.n} m={g.m}", file=sys.stderr)
    return 0


def cmd_truth(args) -> int:
    g = graph_from_spec(args.graph)
    iters = args.iterations or truth_iterations(args.alpha)
    vec = ground_truth(g, args.source, args.alpha, iters)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        for u, x in enumerate(vec.values):
            out.write(f"{int(g.labels[u])} {float(x)!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="edgepush", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="sweep a parameter grid and write CSV rows")
    r.add_argument("graph", help="edge-list path or generator spec such as star:n=100")
    r.add_argument("--algorithm", choices=ALGORITHMS, default="edgepush")
    r.add_argument("--error-mode", choices=("l1", "additive"), default="l1")
    r.add_argument("--alpha", type=float, default=0.2)
    r.add_argument("--grid", type=_floats, help="comma-separated parameter values")
    r.add_argument("--grid-start", type=float, default=0.1)
    r.add_argument("--grid-steps", type=int, default=4)
    r.add_argument("--grid-factor", type=float, default=0.1)
    r.add_argument("--queries", type=int, default=10)
    r.add_argument("--sources", type=_ints, help="explicit comma-separated source ids")
    r.add_argument("--source-mode", choices=("degree", "uniform"), default="degree")
    r.add_argument("--k", type=int, default=50)
    r.add_argument("--seed", type=int, default=env_int("EDGEPUSH_SEED", 0))
    r.add_argument("--threads", type=int, default=env_int("EDGEPUSH_THREADS", 1))
    r.add_argument("--scan-fraction", type=float, default=DEFAULT_SCAN_FRACTION)
    r.add_argument("--push-theta", type=float, help="push threshold for fora")
    r.add_argument("--truth-iterations", type=int)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="print edge-weight unbalance statistics as JSON")
    rep.add_argument("graph")
    rep.add_argument("--per-node", action="store_true")
    rep.add_argument("-o", "--output")
    rep.set_defaults(func=cmd_report)

    gen = sub.add_parser("gen", help="write a synthetic graph as an edge list")
    gen.add_argument("kind", choices=("star", "affinity", "motif", "bundled"))
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--n", type=int, default=1000)
    gen.add_argument("--b", type=float)
    gen.add_argument("--tail", type=float)
    gen.add_argument("--dim", type=int, default=1)
    gen.add_argument("--coord-var", type=float, default=1.0)
    gen.add_argument("--c", type=float, default=1.0)
    gen.add_argument("--d2", type=float)
    gen.add_argument("--bandwidth", choices=("scaled", "empirical_variance"), default="scaled")
    gen.add_argument("--seed", type=int, default=env_int("EDGEPUSH_SEED", 0))
    gen.add_argument("--input", help="unweighted edge list for motif weighting "
                                     "(default: bundled 1k-node graph)")
    gen.set_defaults(func=cmd_gen)

    t = sub.add_parser("truth", help="power-iteration PPR vector, one 'node value' line each")
    t.add_argument("graph")
    t.add_argument("--source", type=int, required=True)
    t.add_argument("--alpha", type=float, default=0.2)
    t.add_argument("--iterations", type=int)
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_truth)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # output piped into e.g. head; silence the flush at exit too
        sys.stdout = open(os.devnull, "w")
        return 0


if __name__ == "__main__":
    sys.exit(main())
