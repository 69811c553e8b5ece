"""Immutable CSR storage for undirected weighted graphs.

Every undirected edge ``(u, v)`` is stored twice, once in each endpoint's
adjacency list, so the arrays describe the set of directed edges.  Each
adjacency list is sorted by descending weight with ties broken by ascending
node id.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

log = logging.getLogger(__name__)

NEIGHBOR_DTYPE = np.int32


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected weighted graph in CSR form.

    Use :meth:`from_edges` or :func:`load_edge_list` rather than the raw
    constructor; those enforce symmetry, positivity and the sort order.
    """

    offsets: np.ndarray
    neighbors: np.ndarray
    weights: np.ndarray
    labels: np.ndarray
    degrees: np.ndarray = field(init=False)
    total_weight: float = field(init=False)
    sqrt_weight_sum: float = field(init=False)
    per_node_sqrt_sum: np.ndarray = field(init=False)

    def __post_init__(self):
        n = len(self.offsets) - 1
        sizes = np.diff(self.offsets)
        src = np.repeat(np.arange(n, dtype=np.int64), sizes)
        degrees = np.bincount(src, weights=self.weights, minlength=n)
        sqrt_w = np.sqrt(self.weights)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "total_weight", float(self.weights.sum()))
        object.__setattr__(self, "sqrt_weight_sum", float(sqrt_w.sum()))
        # sqrt(A_xv) summed over x in N(v); symmetric, so equal to the row sum
        object.__setattr__(self, "per_node_sqrt_sum",
                           np.bincount(src, weights=sqrt_w, minlength=n))
        for arr in (self.offsets, self.neighbors, self.weights, self.labels,
                    self.degrees, self.per_node_sqrt_sum):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.offsets) - 1

    @property
    def m(self) -> int:
        return len(self.neighbors) // 2

    @property
    def num_directed_edges(self) -> int:
        return len(self.neighbors)

    @cached_property
    def neighbor_counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    @cached_property
    def sources(self) -> np.ndarray:
        """Tail node of every directed edge, aligned with ``neighbors``."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.neighbor_counts)

    @cached_property
    def reverse_edge(self) -> np.ndarray:
        """Index of the edge ``<v,u>`` for every directed edge ``<u,v>``."""
        src = self.sources
        dst = self.neighbors.astype(np.int64)
        fwd = np.lexsort((dst, src))
        rev = np.lexsort((src, dst))
        out = np.empty(len(dst), dtype=np.int64)
        out[fwd] = rev
        return out

    def _check_node(self, u: int) -> int:
        if not 0 <= u < self.n:
            raise IndexError(f"node {u} out of range for graph with {self.n} nodes")
        return int(u)

    def degree(self, u: int) -> float:
        u = self._check_node(u)
        return float(self.degrees[u])

    def neighbors_iter(self, u: int) -> list[tuple[int, float]]:
        u = self._check_node(u)
        lo, hi = self.offsets[u], self.offsets[u + 1]
        return list(zip(self.neighbors[lo:hi].tolist(), self.weights[lo:hi].tolist()))

    def edge_range(self, u: int) -> slice:
        return slice(int(self.offsets[u]), int(self.offsets[u + 1]))

    def undirected_edges(self) -> Iterator[tuple[int, int, float]]:
        """Each undirected edge once, ordered by (min endpoint, max endpoint)."""
        src, dst, w = self.sources, self.neighbors.astype(np.int64), self.weights
        keep = src < dst
        src, dst, w = src[keep], dst[keep], w[keep]
        order = np.lexsort((dst, src))
        for i in order:
            yield int(src[i]), int(dst[i]), float(w[i])

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.sources, self.neighbors] = self.weights
        return a

    @classmethod
    def from_csr(cls, offsets, neighbors, weights, labels=None) -> "WeightedGraph":
        """Wrap CSR arrays that already satisfy every invariant (no checks)."""
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        n = len(offsets) - 1
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        return cls(offsets=offsets,
                   neighbors=np.ascontiguousarray(neighbors, dtype=NEIGHBOR_DTYPE),
                   weights=np.ascontiguousarray(weights, dtype=np.float64),
                   labels=np.asarray(labels, dtype=np.int64))

    @classmethod
    def from_edges(cls, u: Sequence[int] | np.ndarray, v: Sequence[int] | np.ndarray,
                   w: Sequence[float] | np.ndarray | None = None, n: int | None = None,
                   labels: np.ndarray | None = None) -> "WeightedGraph":
        """Build a graph from undirected edges given in dense ids.

        Either orientation may appear; duplicate pairs are merged by summing
        their weights, self-loops and zero weights are dropped.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.ones(len(u)) if w is None else np.asarray(w, dtype=np.float64)
        if not (len(u) == len(v) == len(w)):
            raise ValueError("edge arrays differ in length")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("edge weights must be finite and non-negative")
        if n is None:
            n = int(max(u.max(initial=-1), v.max(initial=-1))) + 1
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        keep = (u != v) & (w > 0)
        lo = np.minimum(u, v)[keep]
        hi = np.maximum(u, v)[keep]
        w = w[keep]
        key = lo * n + hi
        uniq, inv = np.unique(key, return_inverse=True)
        merged = np.bincount(inv, weights=w, minlength=len(uniq)) if len(uniq) else np.zeros(0)
        lo, hi = uniq // n, uniq % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        ww = np.concatenate([merged, merged])
        order = np.lexsort((dst, -ww, src))
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls.from_csr(offsets, dst[order], ww[order], labels)

    def validate(self) -> None:
        """Check every structural invariant; raises AssertionError on failure."""
        n = self.n
        assert self.offsets[0] == 0 and self.offsets[-1] == len(self.neighbors)
        assert np.all(np.diff(self.offsets) >= 0)
        assert np.all(self.weights > 0), "non-positive weight"
        src, dst = self.sources, self.neighbors.astype(np.int64)
        assert np.all((dst >= 0) & (dst < n))
        assert not np.any(src == dst), "self-loop"
        pair = src * n + dst
        assert len(np.unique(pair)) == len(pair), "duplicate neighbor"
        rev = self.reverse_edge
        assert np.array_equal(src[rev], dst) and np.array_equal(dst[rev], src), "asymmetric"
        assert np.array_equal(self.weights[rev], self.weights), "asymmetric weight"
        for u in range(n):
            sl = self.edge_range(u)
            w, nb = self.weights[sl], self.neighbors[sl]
            ok = (w[:-1] > w[1:]) | ((w[:-1] == w[1:]) & (nb[:-1] < nb[1:]))
            assert np.all(ok), f"adjacency of node {u} not sorted"


@dataclass(frozen=True)
class SourceDistribution:
    mode: str = "degree"  # "degree" or "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("degree", "uniform"):
            raise ValueError(f"unknown source distribution {self.mode!r}")


def sample_sources(g: WeightedGraph, dist: SourceDistribution, count: int) -> list[int]:
    """Draw ``count`` source nodes; degree-0 nodes are never drawn."""
    if count <= 0:
        raise ValueError("count must be positive")
    eligible = g.degrees > 0
    if not eligible.any():
        raise ValueError("graph has no edges")
    rng = np.random.default_rng(dist.seed)
    if dist.mode == "degree":
        p = g.degrees / g.degrees.sum()
    else:
        p = eligible / eligible.sum()
    return rng.choice(g.n, size=count, p=p).tolist()


def _parse_lines(lines: Iterator[str]):
    us, vs, ws = [], [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"expected 'u v w', got {raw.strip()!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphFormatError(f"cannot parse {raw.strip()!r}", lineno) from None
        if a < 0 or b < 0:
            raise GraphFormatError("node labels must be non-negative integers", lineno)
        if not np.isfinite(w):
            raise GraphFormatError(f"non-finite weight {parts[2]}", lineno)
        if w < 0:
            raise GraphFormatError(f"negative weight {w}", lineno)
        us.append(a)
        vs.append(b)
        ws.append(w)
    return us, vs, ws


def load_edge_list(path: str | Path, dedup: bool = True, drop_zero: bool = True) -> WeightedGraph:
    """Read a whitespace-separated ``u v w`` edge list.

    Labels are remapped to dense ids in ascending label order; the original
    labels are kept in ``WeightedGraph.labels``.  A missing weight column is
    read as weight 1.
    """
    with open(path) as fh:
        us, vs, ws = _parse_lines(fh)
    return graph_from_labeled_edges(us, vs, ws, dedup=dedup, drop_zero=drop_zero)


def graph_from_labeled_edges(us, vs, ws, dedup: bool = True, drop_zero: bool = True) -> WeightedGraph:
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    w = np.asarray(ws, dtype=np.float64)
    zero = w == 0
    if zero.any() and not drop_zero:
        raise GraphFormatError(f"{int(zero.sum())} zero-weight edge(s) with drop_zero disabled")
    keep = (~zero) & (u != v)
    if (u == v).any():
        log.debug("dropping %d self-loop(s)", int((u == v).sum()))
    u, v, w = u[keep], v[keep], w[keep]
    if len(u) == 0:
        raise GraphFormatError("graph has no edges")
    if not dedup:
        pairs = np.minimum(u, v) * (max(u.max(), v.max()) + 1) + np.maximum(u, v)
        if len(np.unique(pairs)) != len(pairs):
            raise GraphFormatError("duplicate edges present and dedup disabled")
    labels, inv = np.unique(np.concatenate([u, v]), return_inverse=True)
    k = len(u)
    return WeightedGraph.from_edges(inv[:k], inv[k:], w, n=len(labels), labels=labels)


def write_edge_list(g: WeightedGraph, path: str | Path, use_labels: bool = True) -> None:
    """Canonical serialization: one line per undirected edge, sorted by
    (min endpoint, max endpoint), weights printed round-trip exact."""
    labels = g.labels if use_labels else np.arange(g.n)
    with open(path, "w") as fh:
        for a, b, w in g.undirected_edges():
            la, lb = int(labels[a]), int(labels[b])
            if la > lb:
                la, lb = lb, la
            fh.write(f"{la} {lb} {w!r}\n")


def isolated_source_warning(s: int) -> None:
    warnings.warn(f"source {s} has no edges; returning the indicator vector", RuntimeWarning,
                  stacklevel=3)
