"""Synthetic weighted graphs: triangle-weighted graphs, Gaussian affinity graphs
and the unbalanced star on which LocalPush does needless work."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import NEIGHBOR_DTYPE, WeightedGraph

AFFINITY_MAX_POINTS = 20_000
_ROW_BLOCK = 256


def motif_weight(g: WeightedGraph) -> WeightedGraph:
    """Reweight each edge by the number of triangles through it (weights of g ignored).

    Edges on no triangle disappear, so the result may be disconnected or empty.
    """
    a = sp.csr_matrix((np.ones(g.num_directed_edges), (g.sources, g.neighbors)),
                      shape=(g.n, g.n))
    tri = sp.triu((a @ a).multiply(a), k=1).tocoo()
    keep = tri.data > 0
    if not keep.any():
        warnings.warn("graph has no triangles; motif-weighted graph is empty", RuntimeWarning,
                      stacklevel=2)
    return WeightedGraph.from_edges(tri.row[keep], tri.col[keep], tri.data[keep].astype(float),
                                    n=g.n, labels=g.labels)


@dataclass(frozen=True)
class AffinityConfig:
    """Points drawn from N(0, coord_var I_dim); A_ij = exp(-|x_i - x_j|^2 / 2 sigma^2).

    ``scaled`` bandwidth: sigma^2 = c * d2 * coord_var, with d2 defaulting to
    ``dim`` (so sigma^2 is c times the expected total variance of a point).
    ``empirical_variance``: sigma^2 = c * total sample variance of the points.
    """

    n_points: int
    dim: int = 1
    coord_var: float = 1.0
    bandwidth_mode: str = "scaled"
    c: float = 1.0
    d2: float | None = None
    rng_seed: int = 0
    max_points: int = AFFINITY_MAX_POINTS

    def __post_init__(self):
        if self.n_points < 2 or self.dim < 1:
            raise ValueError("need n_points >= 2 and dim >= 1")
        if self.coord_var <= 0 or self.c <= 0:
            raise ValueError("coord_var and c must be positive")
        if self.bandwidth_mode not in ("scaled", "empirical_variance"):
            raise ValueError(f"unknown bandwidth mode {self.bandwidth_mode!r}")
        if self.n_points > self.max_points:
            raise ValueError(f"{self.n_points} points exceeds the dense cap {self.max_points}")

    def sigma2(self, points: np.ndarray) -> float:
        if self.bandwidth_mode == "empirical_variance":
            return self.c * float(points.var(axis=0).sum())
        d2 = self.dim if self.d2 is None else self.d2
        return self.c * d2 * self.coord_var


# the four sensitivity configurations, ordered from most to least unbalanced
SENSITIVITY_CONFIGS = (
    dict(dim=1, coord_var=1e3, c=0.1),
    dict(dim=1, coord_var=50.0, c=1.0),
    dict(dim=13, coord_var=50.0, c=1.0),
    dict(dim=20, coord_var=50.0, c=1.0),
)


def sample_points(cfg: AffinityConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.rng_seed)
    return rng.normal(0.0, np.sqrt(cfg.coord_var), size=(cfg.n_points, cfg.dim))


def affinity_graph(cfg: AffinityConfig) -> WeightedGraph:
    pts = sample_points(cfg)
    return affinity_from_points(pts, cfg.sigma2(pts))


def affinity_from_points(points: np.ndarray, sigma2: float) -> WeightedGraph:
    """Complete Gaussian-kernel graph, built straight into sorted CSR.

    Squared distances are summed coordinate by coordinate so that the (i, j)
    and (j, i) entries are computed identically and the graph is exactly
    symmetric.  Coincident points get weight 1; underflowed zeros are dropped.
    """
    x = np.ascontiguousarray(points, dtype=float)
    n = len(x)
    if sigma2 <= 0:
        raise ValueError("sigma^2 must be positive")
    nbrs = np.empty(n * (n - 1), NEIGHBOR_DTYPE)
    wts = np.empty(n * (n - 1))
    offsets = np.zeros(n + 1, np.int64)
    pos = 0
    cols = np.arange(n)
    for i0 in range(0, n, _ROW_BLOCK):
        i1 = min(n, i0 + _ROW_BLOCK)
        d2 = np.zeros((i1 - i0, n))
        for k in range(x.shape[1]):
            d2 += (x[i0:i1, k, None] - x[None, :, k]) ** 2
        w = np.exp(-d2 / (2.0 * sigma2))
        for r in range(i1 - i0):
            i = i0 + r
            row = w[r]
            ok = (row > 0) & (cols != i)
            idx = cols[ok]
            order = np.argsort(-row[idx], kind="stable")
            k = len(idx)
            nbrs[pos:pos + k] = idx[order]
            wts[pos:pos + k] = row[idx][order]
            pos += k
            offsets[i + 1] = pos
    if pos < len(wts):
        nbrs, wts = nbrs[:pos].copy(), wts[:pos].copy()
    return WeightedGraph.from_csr(offsets, nbrs, wts)


def unbalanced_star_graph(n: int, b: float | None = None,
                          tail_weight: float | None = None) -> WeightedGraph:
    """Hub 0 joined to leaves 1..n; leaf 1 gets weight b, the rest share 1 - b.

    The hub's degree is 1.  ``tail_weight`` optionally hangs an extra node
    n+1 off the heavy leaf.
    """
    if n < 3:
        raise ValueError("need at least 3 leaves")
    if b is None:
        b = 1.0 - 1.0 / n
    if not 0.0 < b < 1.0:
        raise ValueError("b must lie in (0, 1)")
    u = [0] * n
    v = list(range(1, n + 1))
    w = [b] + [(1.0 - b) / (n - 1)] * (n - 1)
    if tail_weight is not None:
        if tail_weight <= 0:
            raise ValueError("tail weight must be positive")
        u.append(1)
        v.append(n + 1)
        w.append(tail_weight)
    return WeightedGraph.from_edges(u, v, w)
