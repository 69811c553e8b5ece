"""Exact and power-iteration PPR, and checkers for the push invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import WeightedGraph

DENSE_LIMIT = 2048
GROUND_TRUTH_ITERATIONS = 100


@dataclass
class PprVector:
    source: int
    alpha: float
    values: np.ndarray


@dataclass
class PprMatrix:
    """Row ``u`` is the PPR vector with source ``u``."""

    alpha: float
    rows: np.ndarray

    def __getitem__(self, u: int) -> np.ndarray:
        return self.rows[u]


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def transition_matrix_dense(g: WeightedGraph) -> np.ndarray:
    """P = A D^-1; an isolated node keeps its walk in place."""
    a = g.to_dense()
    deg = g.degrees
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    p = a * inv[None, :]
    iso = np.flatnonzero(deg == 0)
    p[iso, iso] = 1.0
    return p


def transition_matrix(g: WeightedGraph) -> sp.csr_matrix:
    deg = g.degrees
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    # entry (v, u) = A_uv / d(u), so column u spreads u's mass
    p = sp.csr_matrix((g.weights * inv[g.sources], (g.neighbors, g.sources)), shape=(g.n, g.n))
    iso = np.flatnonzero(deg == 0)
    if len(iso):
        p = p + sp.csr_matrix((np.ones(len(iso)), (iso, iso)), shape=(g.n, g.n))
    return p


def _system(g: WeightedGraph, alpha: float) -> np.ndarray:
    if g.n > DENSE_LIMIT:
        raise ValueError(f"graph has {g.n} nodes, dense oracle limit is {DENSE_LIMIT}; "
                         "use ground_truth instead")
    return np.eye(g.n) - (1.0 - alpha) * transition_matrix_dense(g)


def exact_ppr(g: WeightedGraph, s: int, alpha: float) -> PprVector:
    """Solve (I - (1-alpha) P) pi = alpha e_s by LU with partial pivoting."""
    _check_alpha(alpha)
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range")
    m = _system(g, alpha)
    rhs = np.zeros(g.n)
    rhs[s] = alpha
    pi = np.linalg.solve(m, rhs)
    resid = np.abs(m @ pi - rhs).max()
    assert resid <= 1e-10, f"dense solve residual {resid}"
    return PprVector(s, alpha, pi)


def ppr_matrix(g: WeightedGraph, alpha: float) -> PprMatrix:
    _check_alpha(alpha)
    m = _system(g, alpha)
    cols = alpha * np.linalg.inv(m)
    return PprMatrix(alpha, np.ascontiguousarray(cols.T))


def power_iterations(g: WeightedGraph, s: int, alpha: float, iterations: int) -> np.ndarray:
    """pi^(L) from pi^(0) = 0 via pi <- (1-alpha) P pi + alpha e_s."""
    _check_alpha(alpha)
    if iterations < 1:
        raise ValueError("need at least one iteration")
    p = transition_matrix(g)
    pi = np.zeros(g.n)
    for _ in range(iterations):
        pi = (1.0 - alpha) * (p @ pi)
        pi[s] += alpha
    return pi


def iterations_for(alpha: float, tol: float = 1e-12) -> int:
    """Smallest L >= 100 with (1-alpha)^L <= tol."""
    return max(GROUND_TRUTH_ITERATIONS, math.ceil(math.log(tol) / math.log(1.0 - alpha)))


def ground_truth(g: WeightedGraph, s: int, alpha: float,
                 iterations: int = GROUND_TRUTH_ITERATIONS) -> PprVector:
    if not 0 <= s < g.n:
        raise IndexError(f"source {s} out of range")
    return PprVector(s, alpha, power_iterations(g, s, alpha, iterations))


def _as_rows(ppr: PprMatrix | np.ndarray) -> np.ndarray:
    return ppr.rows if isinstance(ppr, PprMatrix) else np.asarray(ppr)


def check_localpush_invariant(g: WeightedGraph, s: int, alpha: float, reserve, residue,
                              ppr: PprMatrix | np.ndarray) -> float:
    """max_t |pi(t) - reserve(t) - sum_u residue(u) pi_u(t)|."""
    rows = _as_rows(ppr)
    reserve = np.asarray(reserve, dtype=float)
    residue = np.asarray(residue, dtype=float)
    if reserve.shape != (g.n,) or residue.shape != (g.n,) or rows.shape != (g.n, g.n):
        raise ValueError("dimension mismatch")
    return float(np.abs(rows[s] - reserve - residue @ rows).max())


def edge_residues(g: WeightedGraph, alpha: float, income, expense) -> np.ndarray:
    """R_uv = (1-alpha) q(u) A_uv / d(u) - Q_uv for every directed edge."""
    income = np.asarray(income, dtype=float)
    src = g.sources
    return (1.0 - alpha) * income[src] * g.weights / g.degrees[src] - np.asarray(expense)


def check_edgepush_invariant(g: WeightedGraph, s: int, alpha: float, income, expense,
                             ppr: PprMatrix | np.ndarray) -> float:
    """max_t |pi(t) - alpha q(t) - sum_<u,v> R_uv pi_v(t)|."""
    rows = _as_rows(ppr)
    income = np.asarray(income, dtype=float)
    expense = np.asarray(expense, dtype=float)
    if income.shape != (g.n,) or expense.shape != (g.num_directed_edges,) \
            or rows.shape != (g.n, g.n):
        raise ValueError("dimension mismatch")
    r = edge_residues(g, alpha, income, expense)
    pending = r @ rows[g.neighbors]
    return float(np.abs(rows[s] - alpha * income - pending).max())

