"""Node-granular LocalPush with one global threshold."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .estimate import (InvariantViolation, PprEstimate, PushAccounting, debug_enabled,
                       indicator)
from .graph import WeightedGraph, isolated_source_warning

_NO_TRACE = (np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, 0), np.bool_))


@dataclass
class PushSnapshot:
    """Solver state right after one node push."""

    reserve: np.ndarray
    residue: np.ndarray
    frontier: np.ndarray


def _check_args(g: WeightedGraph, s: int, alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range for {g.n} nodes")


def _isolated(g: WeightedGraph, s: int, alpha: float):
    isolated_source_warning(s)
    est = PprEstimate(s, alpha, indicator(g.n, s), "localpush", isolated=True,
                      residue=np.zeros(g.n))
    return est, PushAccounting(per_node=np.zeros(g.n, np.int64))


def _run(g, s, alpha, theta, counts, trace):
    return _kernels.localpush_kernel(g.offsets, g.neighbors, g.weights, g.degrees, int(s),
                                     float(alpha), float(theta), counts, *trace)


def localpush(g: WeightedGraph, s: int, alpha: float, theta: float,
              debug: bool | None = None) -> tuple[PprEstimate, PushAccounting]:
    """Push from any node with r(u) >= d(u)*theta until none is left (FIFO order)."""
    _check_args(g, s, alpha)
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    if g.degrees[s] == 0:
        return _isolated(g, s, alpha)
    _kernels.warmup()
    counts = np.zeros(g.n, np.int64)
    t0 = time.perf_counter()
    reserve, residue, pushes, touches = _run(g, s, alpha, theta, counts, _NO_TRACE)
    elapsed = time.perf_counter() - t0
    if debug_enabled(debug):
        _debug_check(g, s, alpha, theta, pushes)
    est = PprEstimate(s, alpha, reserve, "localpush", residue=residue)
    acct = PushAccounting(int(pushes), int(touches), elapsed, counts)
    return est, acct


def localpush_l1(g: WeightedGraph, s: int, alpha: float, epsilon: float,
                 debug: bool | None = None):
    """l1 error <= epsilon via theta = epsilon / ||A||_1."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return localpush(g, s, alpha, epsilon / g.total_weight, debug=debug)


def localpush_additive(g: WeightedGraph, s: int, alpha: float, r_max: float,
                       debug: bool | None = None):
    """Degree-normalized additive error <= r_max via theta = r_max."""
    if not 0.0 < r_max <= 1.0:
        raise ValueError(f"r_max must lie in (0, 1], got {r_max}")
    return localpush(g, s, alpha, r_max, debug=debug)


def localpush_trace(g: WeightedGraph, s: int, alpha: float, theta: float,
                    max_pushes: int | None = None) -> list[PushSnapshot]:
    """Replay a run and return the state after each push (dense, small graphs only)."""
    _check_args(g, s, alpha)
    if g.degrees[s] == 0:
        return []
    empty = np.zeros(0, np.int64)
    if max_pushes is None:
        max_pushes = _run(g, s, alpha, theta, empty, _NO_TRACE)[2]
    tr = (np.zeros((max_pushes, g.n)), np.zeros((max_pushes, g.n)),
          np.zeros((max_pushes, g.n), np.bool_))
    pushes = _run(g, s, alpha, theta, empty, tr)[2]
    k = min(pushes, max_pushes)
    return [PushSnapshot(tr[0][i], tr[1][i], tr[2][i]) for i in range(k)]


def _debug_check(g: WeightedGraph, s: int, alpha: float, theta: float, pushes: int) -> None:
    if pushes * g.n > 50_000_000:
        raise ValueError("debug mode replays every push densely; graph or run too large")
    prev = np.zeros(g.n)
    for i, snap in enumerate(localpush_trace(g, s, alpha, theta, pushes)):
        total = snap.reserve.sum() + snap.residue.sum()
        if abs(total - 1.0) > 1e-10:
            raise InvariantViolation(f"push {i}: mass {total} != 1")
        if (snap.residue < -1e-15).any() or (snap.reserve < prev).any():
            raise InvariantViolation(f"push {i}: negative residue or shrinking reserve")
        eligible = (snap.residue >= g.degrees * theta) & (g.degrees > 0)
        if not np.array_equal(eligible, snap.frontier):
            raise InvariantViolation(f"push {i}: frontier differs from full scan")
        prev = snap.reserve
