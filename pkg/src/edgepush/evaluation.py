"""Error metrics, top-k precision and sweep-cut clustering."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .graph import WeightedGraph


def _pair(est, truth) -> tuple[np.ndarray, np.ndarray]:
    est = np.asarray(getattr(est, "values", est), dtype=float)
    truth = np.asarray(getattr(truth, "values", truth), dtype=float)
    if est.shape != truth.shape:
        raise ValueError(f"dimension mismatch: {est.shape} vs {truth.shape}")
    return est, truth


def l1_error(est, truth) -> float:
    e, t = _pair(est, truth)
    return float(np.abs(e - t).sum())


def max_add_err(est, truth) -> float:
    e, t = _pair(est, truth)
    return float(np.abs(e - t).max()) if len(e) else 0.0


def normalized_max_add_err(g: WeightedGraph, est, truth) -> float:
    """max_u |est(u) - truth(u)| / d(u) over nodes with positive degree."""
    e, t = _pair(est, truth)
    if len(e) != g.n:
        raise ValueError("estimate length differs from node count")
    nz = g.degrees > 0
    if not nz.any():
        return 0.0
    return float((np.abs(e - t)[nz] / g.degrees[nz]).max())


def top_k(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest values, ties by ascending id."""
    ids = np.arange(len(values))
    return np.lexsort((ids, -values))[:k]


def precision_at_k(est, truth, k: int = 50, normalize_by_degree: bool = False,
                   g: WeightedGraph | None = None) -> float:
    e, t = _pair(est, truth)
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(e):
        warnings.warn(f"k={k} exceeds {len(e)} nodes; clamped", RuntimeWarning, stacklevel=2)
        k = len(e)
    if normalize_by_degree:
        if g is None:
            raise ValueError("degree normalization needs the graph")
        d = g.degrees
        inv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
        e, t = e * inv, t * inv
    a = set(top_k(e, k).tolist())
    b = set(top_k(t, k).tolist())
    return len(a & b) / k


_VOL_TOL = 1e-12


def conductance(g: WeightedGraph, nodes) -> float:
    """cut(S) / min(vol(S), vol(V \\ S)); NaN when either side has no volume."""
    mask = np.zeros(g.n, np.bool_)
    mask[np.asarray(list(nodes), dtype=np.int64)] = True
    vol = g.degrees[mask].sum()
    rest = g.total_weight - vol
    crossing = mask[g.sources] != mask[g.neighbors]
    cut = g.weights[crossing].sum() / 2.0
    denom = min(vol, rest)
    # rest is a difference of sums, so treat rounding residue as empty
    return float(cut / denom) if denom > _VOL_TOL * g.total_weight else float("nan")


@dataclass
class SweepResult:
    order: np.ndarray
    conductance: np.ndarray
    best_size: int
    best_conductance: float

    @property
    def best_set(self) -> np.ndarray:
        return self.order[:self.best_size]


def sweep_cut(g: WeightedGraph, est) -> SweepResult:
    """Sort nodes by est(u)/d(u) descending and scan prefixes for the lowest conductance.

    ``conductance[i]`` belongs to the prefix of size i+1 and is NaN where one
    side has zero volume.
    """
    e = np.asarray(getattr(est, "values", est), dtype=float)
    if len(e) != g.n:
        raise ValueError("estimate length differs from node count")
    d = g.degrees
    score = np.divide(e, d, out=np.zeros_like(e), where=d > 0)
    cand = np.flatnonzero(score > 0)
    if not len(cand):
        raise ValueError("sweep needs an estimate with a nonzero entry")
    order = cand[np.lexsort((cand, -score[cand]))]
    inside = np.zeros(g.n, np.bool_)
    phi = np.full(len(order), np.nan)
    vol = 0.0
    cut = 0.0
    total = g.total_weight
    for i, u in enumerate(order):
        sl = g.edge_range(int(u))
        back = g.weights[sl][inside[g.neighbors[sl]]].sum()
        # edges to S stop crossing, the rest start crossing
        cut += d[u] - 2.0 * back
        vol += d[u]
        inside[u] = True
        denom = min(vol, total - vol)
        if denom > _VOL_TOL * total:
            phi[i] = max(cut, 0.0) / denom
    if np.isnan(phi).all():
        return SweepResult(order, phi, 0, float("nan"))
    best = int(np.nanargmin(phi))
    return SweepResult(order, phi, best + 1, float(phi[best]))


@dataclass
class EvalReport:
    l1_error: float
    max_add_err: float
    normalized_max_add_err: float
    precision_at_k: float
    normalized_precision_at_k: float
    best_conductance: float
    best_sweep_set_size: int
    query_time_seconds: float

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(g: WeightedGraph, est, truth, k: int = 50,
             query_time: float = 0.0) -> EvalReport:
    e, t = _pair(est, truth)
    kk = min(k, g.n)
    try:
        sw = sweep_cut(g, e)
        best_phi, best_size = sw.best_conductance, sw.best_size
    except ValueError:
        best_phi, best_size = float("nan"), 0
    return EvalReport(l1_error(e, t), max_add_err(e, t), normalized_max_add_err(g, e, t),
                      precision_at_k(e, t, kk), precision_at_k(e, t, kk, True, g),
                      best_phi, best_size, query_time)
