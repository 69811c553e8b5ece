"""Edge-granular push with per-directed-edge termination thresholds.

Every directed edge <u,v> owes ``R_uv = (1-alpha) q(u) A_uv / d(u) - Q_uv``
to ``v``.  An edge is pushed when its residue reaches ``theta(u,v)``; the
run stops once no such edge exists and returns ``alpha * q``.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .estimate import (EdgePushAccounting, InvariantViolation, PprEstimate, debug_enabled,
                       indicator)
from .graph import WeightedGraph, isolated_source_warning
from .oracle import edge_residues

DEFAULT_SCAN_FRACTION = 1.0 / 8.0


@dataclass(eq=False)
class EdgeThresholds:
    """theta(u,v) for every directed edge of one graph.

    The l1 and additive policies are evaluated inside the kernel from the
    graph's aggregates; only explicit thresholds are stored per edge.
    """

    graph: WeightedGraph
    policy: str
    param: float
    values: np.ndarray | None = None
    _order: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def l1(cls, g: WeightedGraph, epsilon: float) -> "EdgeThresholds":
        """theta(u,v) = eps * sqrt(A_uv) / sum of sqrt weights; sums to eps."""
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        return cls(g, "l1", float(epsilon))

    @classmethod
    def additive(cls, g: WeightedGraph, r_max: float) -> "EdgeThresholds":
        """theta(u,v) = r_max * d(v) * sqrt(A_uv) / sum_x sqrt(A_xv)."""
        if not r_max > 0:
            raise ValueError("r_max must be positive")
        return cls(g, "additive", float(r_max))

    @classmethod
    def explicit(cls, g: WeightedGraph, values) -> "EdgeThresholds":
        values = np.array(values, dtype=float)
        if values.shape != (g.num_directed_edges,):
            raise ValueError("need one threshold per directed edge")
        if not (values > 0).all():
            raise ValueError("thresholds must be positive on every edge")
        return cls(g, "explicit", 0.0, values)

    @property
    def mode(self) -> int:
        return {"l1": _kernels.THETA_L1, "additive": _kernels.THETA_ADDITIVE,
                "explicit": _kernels.THETA_EXPLICIT}[self.policy]

    @property
    def norm(self) -> float:
        return self.graph.sqrt_weight_sum if self.policy == "l1" else 1.0

    def theta(self) -> np.ndarray:
        g = self.graph
        if self.policy == "explicit":
            return self.values
        sq = np.sqrt(g.weights)
        if self.policy == "l1":
            return self.param * sq / g.sqrt_weight_sum
        v = g.neighbors
        # same operation order as the kernel, so keys agree bit for bit
        return self.param * g.degrees[v] * sq / g.per_node_sqrt_sum[v]

    def initial_order(self) -> np.ndarray:
        """Per-node local positions sorted by initial key theta/A (ties by position).

        Empty for the l1 policy, where adjacency order already is key order.
        """
        if self._order is None and self.policy == "l1":
            self._order = np.zeros(0, np.int32)
            self._order.flags.writeable = False
        if self._order is None:
            g = self.graph
            keys = self.theta() / g.weights
            pos = np.arange(g.num_directed_edges)
            glob = np.lexsort((pos, keys, g.sources))
            self._order = (glob - g.offsets[g.sources]).astype(np.int32)
            self._order.flags.writeable = False
        return self._order

    def total(self) -> float:
        return float(self.theta().sum())


def _kernel_call(g, s, alpha, th: EdgeThresholds, fraction, counts, trace):
    theta_arr = th.values if th.policy == "explicit" else np.zeros(0)
    return _kernels.edgepush_kernel(
        g.offsets, g.neighbors, g.weights, g.degrees, g.per_node_sqrt_sum, int(s), float(alpha),
        th.mode, th.param, th.norm, theta_arr, th.initial_order(), fraction,
        counts, *trace)


def _no_trace():
    return (np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, 0), np.bool_),
            np.zeros(0, np.int64))


def _validate(g: WeightedGraph, s: int, alpha: float, th: EdgeThresholds) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range for {g.n} nodes")
    if th.graph is not g:
        raise ValueError("thresholds were built for a different graph")


def _solve(g, s, alpha, th, fraction, debug, track_counts, method):
    _validate(g, s, alpha, th)
    if g.degrees[s] == 0:
        isolated_source_warning(s)
        q = indicator(g.n, s) / alpha
        est = PprEstimate(s, alpha, indicator(g.n, s), method, isolated=True,
                          income=q, expense=np.zeros(g.num_directed_edges))
        return est, EdgePushAccounting()
    _kernels.warmup()
    counts = np.zeros(g.num_directed_edges if track_counts else 0, np.int64)
    t0 = time.perf_counter()
    q, Q, pushes, qops, switched, scanned = _kernel_call(g, s, alpha, th, fraction,
                                                         counts, _no_trace())
    elapsed = time.perf_counter() - t0
    if debug_enabled(debug):
        _debug_check(g, s, alpha, th, fraction, pushes)
    est = PprEstimate(s, alpha, alpha * q, method, income=q, expense=Q)
    acct = EdgePushAccounting(int(pushes), int(qops), int(switched), int(scanned), elapsed,
                              counts if track_counts else None)
    return est, acct


def edgepush(g: WeightedGraph, s: int, alpha: float, thresholds: EdgeThresholds,
             debug: bool | None = None, track_counts: bool = False):
    return _solve(g, s, alpha, thresholds, 0.0, debug, track_counts, "edgepush")


def edgepush_l1(g: WeightedGraph, s: int, alpha: float, epsilon: float, **kw):
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return edgepush(g, s, alpha, EdgeThresholds.l1(g, epsilon), **kw)


def edgepush_additive(g: WeightedGraph, s: int, alpha: float, r_max: float, **kw):
    if not 0.0 < r_max <= 1.0:
        raise ValueError(f"r_max must lie in (0, 1], got {r_max}")
    return edgepush(g, s, alpha, EdgeThresholds.additive(g, r_max), **kw)


def edgepush_with_scan_switch(g: WeightedGraph, s: int, alpha: float,
                              thresholds: EdgeThresholds,
                              scan_threshold_fraction: float = DEFAULT_SCAN_FRACTION,
                              debug: bool | None = None, track_counts: bool = False):
    """EdgePush that falls back to sequential scans of all edges once the
    active nodes' neighbourhoods exceed ``scan_threshold_fraction * 2m``."""
    if not 0.0 < scan_threshold_fraction <= 1.0:
        raise ValueError("scan_threshold_fraction must lie in (0, 1]")
    return _solve(g, s, alpha, thresholds, scan_threshold_fraction, debug, track_counts,
                  "edgepush-scan")


def predicted_push_bound(g: WeightedGraph, alpha: float, thresholds: EdgeThresholds,
                         ppr) -> np.ndarray:
    """Per-directed-edge push count bound (1-alpha) pi(u) A_uv / (alpha d(u) theta(u,v))."""
    pi = np.asarray(getattr(ppr, "values", ppr), dtype=float)
    src = g.sources
    return (1.0 - alpha) * pi[src] * g.weights / (alpha * g.degrees[src] * thresholds.theta())


@dataclass
class EdgePushSnapshot:
    income: np.ndarray
    expense: np.ndarray
    active: np.ndarray
    edge: int


def edgepush_trace(g: WeightedGraph, s: int, alpha: float, thresholds: EdgeThresholds,
                   scan_threshold_fraction: float = 0.0,
                   max_pushes: int | None = None) -> list[EdgePushSnapshot]:
    """State after every push.  ``active`` is meaningless once a scan switch fired."""
    _validate(g, s, alpha, thresholds)
    if g.degrees[s] == 0:
        return []
    empty = np.zeros(0, np.int64)
    if max_pushes is None:
        max_pushes = _kernel_call(g, s, alpha, thresholds, scan_threshold_fraction, empty,
                                  _no_trace())[2]
    m2 = g.num_directed_edges
    tr = (np.zeros((max_pushes, g.n)), np.zeros((max_pushes, m2)),
          np.zeros((max_pushes, g.n), np.bool_), np.zeros(max_pushes, np.int64))
    pushes = _kernel_call(g, s, alpha, thresholds, scan_threshold_fraction, empty, tr)[2]
    return [EdgePushSnapshot(tr[0][i], tr[1][i], tr[2][i], int(tr[3][i]))
            for i in range(min(pushes, max_pushes))]


def active_nodes(g: WeightedGraph, alpha: float, thresholds: EdgeThresholds,
                 income, expense) -> np.ndarray:
    """Full recomputation of {u : some edge of u has R_uv >= theta(u,v)}."""
    hot = edge_residues(g, alpha, income, expense) >= thresholds.theta()
    out = np.zeros(g.n, np.bool_)
    out[g.sources[hot]] = True
    return out


def _debug_check(g, s, alpha, th, fraction, pushes) -> None:
    if pushes * (g.n + g.num_directed_edges) > 50_000_000:
        raise ValueError("debug mode replays every push densely; graph or run too large")
    theta = th.theta()
    snaps = edgepush_trace(g, s, alpha, th, fraction, pushes)
    prev = np.zeros(g.num_directed_edges)
    scale = 1e-12 * max(1.0, float(theta.max()))
    for i, snap in enumerate(snaps):
        incoming = np.bincount(g.neighbors, weights=snap.expense, minlength=g.n)
        incoming[s] += 1.0
        if np.abs(incoming - snap.income).max() > 1e-10:
            raise InvariantViolation(f"push {i}: income differs from received expense")
        r = edge_residues(g, alpha, snap.income, snap.expense)
        if r.min() < -1e-12:
            raise InvariantViolation(f"push {i}: negative edge residue {r.min()}")
        if (snap.expense < prev).any():
            raise InvariantViolation(f"push {i}: queue key decreased")
        prev = snap.expense
        if fraction == 0.0:
            want = active_nodes(g, alpha, th, snap.income, snap.expense)
            if not np.array_equal(want, snap.active):
                raise InvariantViolation(f"push {i}: active list differs from full scan")
    if snaps:
        last = snaps[-1]
        r = edge_residues(g, alpha, last.income, last.expense)
        if (r >= theta + scale).any():
            raise InvariantViolation("terminated with an edge above its threshold")
