"""Parameter sweeps over SSPPR solvers, one CSV row per (grid point, query)."""
from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

import numpy as np

from . import _kernels
from .baselines import (WalkBudget, alias_tables, default_push_theta, fora_hybrid,
                        monte_carlo, power_method, walks_from_params)
from .edgepush import (DEFAULT_SCAN_FRACTION, EdgeThresholds, edgepush,
                       edgepush_with_scan_switch)
from .evaluation import evaluate
from .generators import AffinityConfig, affinity_graph, motif_weight, unbalanced_star_graph
from .graph import SourceDistribution, WeightedGraph, load_edge_list, sample_sources
from .localpush import localpush
from .oracle import ground_truth

COLUMNS = ["algorithm", "param", "query_id", "source", "l1_error", "max_add_err",
           "norm_max_add_err", "precision_at_k", "norm_precision_at_k", "best_conductance",
           "node_pushes", "edge_pushes", "edges_touched", "wall_time_s"]
ALGORITHMS = ("localpush", "edgepush", "edgepush-scan", "power", "montecarlo", "fora")
PUSH_ALGORITHMS = ("localpush", "edgepush", "edgepush-scan")
BUNDLED = "clustered_1k.txt"


def env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw not in (None, "") else default


def decade_grid(start: float, steps: int, factor: float = 0.1) -> list[float]:
    return [start * factor ** i for i in range(steps)]


def bundled_graph_path() -> Path:
    return Path(str(files("edgepush") / "data" / BUNDLED))


def _spec_args(spec: str) -> tuple[str, dict[str, str]]:
    kind, _, rest = spec.partition(":")
    args = {}
    for part in filter(None, rest.split(",")):
        key, _, val = part.partition("=")
        args[key.strip()] = val.strip()
    return kind.strip(), args


def graph_from_spec(spec: str) -> WeightedGraph:
    """``star:n=4,b=0.7``, ``affinity:n=1000,dim=13,coord_var=50,c=1,seed=0``,
    ``motif:path=FILE`` or ``motif:bundled``, or a plain edge-list path."""
    kind, a = _spec_args(spec)
    if kind == "star":
        tail = a.get("tail")
        return unbalanced_star_graph(int(a["n"]), float(a["b"]) if "b" in a else None,
                                     float(tail) if tail else None)
    if kind == "affinity":
        cfg = AffinityConfig(n_points=int(a["n"]), dim=int(a.get("dim", 1)),
                             coord_var=float(a.get("coord_var", 1.0)),
                             bandwidth_mode=a.get("bandwidth", "scaled"),
                             c=float(a.get("c", 1.0)),
                             d2=float(a["d2"]) if "d2" in a else None,
                             rng_seed=int(a.get("seed", 0)))
        return affinity_graph(cfg)
    if kind == "motif":
        path = bundled_graph_path() if "bundled" in a or "path" not in a else Path(a["path"])
        return motif_weight(load_edge_list(path))
    return load_edge_list(spec)


@dataclass
class ExperimentConfig:
    graph: str
    algorithm: str = "edgepush"
    error_mode: str = "l1"
    alpha: float = 0.2
    grid: list[float] = field(default_factory=lambda: decade_grid(1e-1, 4))
    queries: int = 10
    source_mode: str = "degree"
    sources: list[int] | None = None
    k: int = 50
    seed: int = 0
    scan_fraction: float = DEFAULT_SCAN_FRACTION
    push_theta: float | None = None
    truth_iterations: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.error_mode not in ("l1", "additive"):
            raise ValueError(f"unknown error mode {self.error_mode!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.grid:
            raise ValueError("parameter grid is empty")
        if any(not p > 0 for p in self.grid):
            raise ValueError("grid values must be positive")
        if self.algorithm == "power" and any(p != int(p) or p < 1 for p in self.grid):
            raise ValueError("power grid values are iteration counts, integers >= 1")


def truth_iterations(alpha: float, tol: float = 1e-9) -> int:
    """100 rounds unless (1 - alpha)^100 leaves more than tol unaccounted."""
    return max(100, math.ceil(math.log(tol) / math.log(1.0 - alpha)))


@dataclass
class QueryResult:
    values: np.ndarray
    node_pushes: int = 0
    edge_pushes: int = 0
    edges_touched: int = 0
    wall_time: float = 0.0


def _run_one(g: WeightedGraph, cfg: ExperimentConfig, s: int, param: float,
             query_id: int) -> QueryResult:
    alg, a = cfg.algorithm, cfg.alpha
    if alg == "localpush":
        # the grid is the raw threshold theta in both modes
        est, acct = localpush(g, s, a, param)
        return QueryResult(est.values, acct.node_pushes, 0, acct.edges_touched, acct.wall_time)
    if alg in ("edgepush", "edgepush-scan"):
        th = (EdgeThresholds.l1(g, param) if cfg.error_mode == "l1"
              else EdgeThresholds.additive(g, param))
        th.initial_order()
        if alg == "edgepush":
            est, acct = edgepush(g, s, a, th)
        else:
            est, acct = edgepush_with_scan_switch(g, s, a, th, cfg.scan_fraction)
        return QueryResult(est.values, 0, acct.edge_pushes, acct.edges_touched, acct.wall_time)
    t0 = time.perf_counter()
    if alg == "power":
        vec = power_method(g, s, a, int(param))
        touched = int(param) * g.num_directed_edges
    else:
        walks = walks_from_params(g.n, param)
        budget = WalkBudget(walks, cfg.seed * 1_000_003 + query_id)
        if alg == "montecarlo":
            vec = monte_carlo(g, s, a, budget)
            touched = 0
        else:
            theta = cfg.push_theta or default_push_theta(g, walks)
            vec = fora_hybrid(g, s, a, theta, budget)
            touched = 0
    return QueryResult(vec.values, 0, 0, touched, time.perf_counter() - t0)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return repr(float(x))


def run_experiment(cfg: ExperimentConfig, g: WeightedGraph | None = None) -> list[dict]:
    """Rows in (grid point, query) order, each grid point closed by a mean row."""
    if g is None:
        g = graph_from_spec(cfg.graph)
    if cfg.sources is not None:
        sources = list(cfg.sources)
    else:
        sources = sample_sources(g, SourceDistribution(cfg.source_mode, cfg.seed), cfg.queries)
    iters = cfg.truth_iterations or truth_iterations(cfg.alpha)
    truths = [ground_truth(g, s, cfg.alpha, iters).values for s in sources]
    _kernels.warmup()
    if cfg.algorithm in ("montecarlo", "fora"):
        alias_tables(g)

    rows: list[dict] = []
    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        for param in cfg.grid:
            jobs = [(qi, s) for qi, s in enumerate(sources)]
            if pool is None:
                results = [_run_one(g, cfg, s, param, qi) for qi, s in jobs]
            else:
                results = list(pool.map(lambda j: _run_one(g, cfg, j[1], param, j[0]), jobs))
            block = []
            for (qi, s), res in zip(jobs, results):
                rep = evaluate(g, res.values, truths[qi], cfg.k, res.wall_time)
                block.append({
                    "algorithm": cfg.algorithm, "param": param, "query_id": qi, "source": s,
                    "l1_error": rep.l1_error, "max_add_err": rep.max_add_err,
                    "norm_max_add_err": rep.normalized_max_add_err,
                    "precision_at_k": rep.precision_at_k,
                    "norm_precision_at_k": rep.normalized_precision_at_k,
                    "best_conductance": rep.best_conductance,
                    "node_pushes": res.node_pushes, "edge_pushes": res.edge_pushes,
                    "edges_touched": res.edges_touched, "wall_time_s": res.wall_time,
                })
            rows.extend(block)
            rows.append(mean_row(block))
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def mean_row(block: list[dict]) -> dict:
    out = {"algorithm": block[0]["algorithm"], "param": block[0]["param"],
           "query_id": "mean", "source": ""}
    for col in COLUMNS[4:]:
        vals = np.array([r[col] for r in block], dtype=float)
        out[col] = float(vals.mean())
    return out


def bound_violations(cfg: ExperimentConfig, rows: list[dict], g: WeightedGraph | None = None,
                     slack: float = 1e-9) -> list[dict]:
    """Per-query push rows whose error column exceeds the configured bound.

    LocalPush rows carry theta, which bounds the l1 error by theta * |A|_1.
    """
    if cfg.algorithm not in PUSH_ALGORITHMS:
        return []
    col = "l1_error" if cfg.error_mode == "l1" else "norm_max_add_err"
    scale = 1.0
    if cfg.algorithm == "localpush" and cfg.error_mode == "l1":
        if g is None:
            raise ValueError("localpush l1 bounds need the graph")
        scale = g.total_weight
    return [r for r in rows if r["query_id"] != "mean" and r[col] > r["param"] * scale + slack]


def rows_to_csv(rows: list[dict], out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text)
    return text
