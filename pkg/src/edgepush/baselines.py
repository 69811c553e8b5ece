"""Reference solvers: power iteration, alpha-random walks, and push followed by walks."""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import WeightedGraph
from .localpush import localpush
from .oracle import PprVector, power_iterations

WALK_BATCH = 1 << 16

_alias_cache: "weakref.WeakKeyDictionary[WeightedGraph, tuple]" = weakref.WeakKeyDictionary()


@dataclass(frozen=True)
class WalkBudget:
    total_walks: int
    rng_seed: int = 0

    def __post_init__(self):
        if self.total_walks < 1:
            raise ValueError("walk budget must be at least 1")


def walks_from_params(n: int, delta: float, eps_r: float = 0.5,
                      p_f: float | None = None) -> int:
    """W = (2 eps_r / 3 + 2) ln(2 / p_f) / (eps_r^2 delta), the usual Chernoff sizing."""
    if p_f is None:
        p_f = 1.0 / n
    return max(1, math.ceil((2 * eps_r / 3 + 2) * math.log(2 / p_f) / (eps_r ** 2 * delta)))


def power_method(g: WeightedGraph, s: int, alpha: float, L: int) -> PprVector:
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range")
    return PprVector(s, alpha, power_iterations(g, s, alpha, L))


def alias_tables(g: WeightedGraph) -> tuple[np.ndarray, np.ndarray]:
    tables = _alias_cache.get(g)
    if tables is None:
        tables = _kernels.alias_tables(g.offsets, g.weights)
        _alias_cache[g] = tables
    return tables


def random_walk_endpoints(g: WeightedGraph, starts: np.ndarray, alpha: float,
                          rng: np.random.Generator) -> np.ndarray:
    """Endpoint of one alpha-random walk from each start node.

    A walk on an isolated node stays put until it stops, so it ends where it is.
    """
    prob, alias = alias_tables(g)
    pos = np.array(starts, dtype=np.int64)
    live = np.arange(len(pos))
    counts = g.neighbor_counts
    while len(live):
        cur = pos[live]
        go = (rng.random(len(live)) >= alpha) & (counts[cur] > 0)
        live = live[go]
        cur = cur[go]
        if not len(live):
            break
        k = (rng.random(len(live)) * counts[cur]).astype(np.int64)
        slot = g.offsets[cur] + k
        keep = rng.random(len(live)) < prob[slot]
        local = np.where(keep, k, alias[slot])
        pos[live] = g.neighbors[g.offsets[cur] + local]
    return pos


def _walk_mass(g, starts, mass, alpha, seed) -> np.ndarray:
    """Sum of ``mass[i]`` at the endpoint of walk ``i``; batched so the result
    does not depend on how the work is split."""
    out = np.zeros(g.n)
    nb = max(1, -(-len(starts) // WALK_BATCH))
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(nb)):
        sl = slice(i * WALK_BATCH, (i + 1) * WALK_BATCH)
        ends = random_walk_endpoints(g, starts[sl], alpha, np.random.default_rng(ss))
        out += np.bincount(ends, weights=mass[sl], minlength=g.n)
    return out


def monte_carlo(g: WeightedGraph, s: int, alpha: float, budget: WalkBudget) -> PprVector:
    """Fraction of W walks from s that stop at each node."""
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range")
    w = budget.total_walks
    starts = np.full(w, s, dtype=np.int64)
    counts = _walk_mass(g, starts, np.ones(w), alpha, budget.rng_seed)
    return PprVector(s, alpha, counts / w)


def default_push_theta(g: WeightedGraph, walks: int) -> float:
    # balance push and walk cost: 1 / sqrt(2m W)
    return 1.0 / math.sqrt(max(1, g.num_directed_edges) * walks)


def fora_hybrid(g: WeightedGraph, s: int, alpha: float, push_theta: float,
                budget: WalkBudget) -> PprVector:
    """LocalPush to push_theta, then ceil(r(u) W) walks from every node left with residue."""
    est, _ = localpush(g, s, alpha, push_theta)
    r = est.residue
    nodes = np.flatnonzero(r > 0)
    k = np.ceil(r[nodes] * budget.total_walks).astype(np.int64)
    starts = np.repeat(nodes, k)
    mass = np.repeat(r[nodes] / k, k)
    return PprVector(s, alpha, est.values + _walk_mass(g, starts, mass, alpha, budget.rng_seed))
