"""How unevenly edge weight is spread, globally and around each node.

cos^2(phi) compares the vector of sqrt edge weights with the all-ones vector;
it is 1 for uniform weights and small when a few edges carry most of the
weight, which is where EdgePush beats LocalPush.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import WeightedGraph

DEFAULT_A = (0.1, 0.25, 0.5)


def cos2_phi(g: WeightedGraph) -> float:
    if g.m == 0:
        raise ValueError("cos^2 phi is undefined on a graph without edges")
    return g.sqrt_weight_sum ** 2 / (g.num_directed_edges * g.total_weight)


def cos2_phi_v(g: WeightedGraph, v: int) -> float:
    if not 0 <= v < g.n:
        raise IndexError(f"node {v} out of range")
    if g.degrees[v] == 0:
        raise ValueError(f"node {v} is isolated")
    return float(g.per_node_sqrt_sum[v] ** 2 / (g.neighbor_counts[v] * g.degrees[v]))


def per_node_cos2(g: WeightedGraph) -> np.ndarray:
    """cos^2 phi_v for every node; NaN on isolated nodes."""
    out = np.full(g.n, np.nan)
    nz = g.degrees > 0
    out[nz] = g.per_node_sqrt_sum[nz] ** 2 / (g.neighbor_counts[nz] * g.degrees[nz])
    return out


def mean_cos2(g: WeightedGraph) -> float:
    """sum_v n(v) cos^2 phi_v / 2m."""
    if g.m == 0:
        raise ValueError("graph has no edges")
    c = per_node_cos2(g)
    nz = g.degrees > 0
    return float((g.neighbor_counts[nz] * c[nz]).sum() / g.num_directed_edges)


def mean_superiority_factor(g: WeightedGraph, alpha: float) -> float:
    """(1 - alpha) / 2m * sum_v n(v) cos^2 phi_v."""
    return (1.0 - alpha) * mean_cos2(g)


def gamma(a: float, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    return (np.sqrt(a * b) + np.sqrt(np.clip((1.0 - a) * (1.0 - b), 0.0, None))) ** 2


@dataclass
class ABProfile:
    """Per-node heavy-prefix share at one requested fraction ``a``.

    ``a_eff`` is the fraction actually used, ceil(a n(v)) / n(v); the bound
    is only valid with it, not with the requested ``a``.
    """

    a: float
    b: np.ndarray
    a_eff: np.ndarray
    gamma: np.ndarray
    max_violation: float

    @property
    def holds(self) -> bool:
        return self.max_violation <= 0.0


def ab_unbalance(g: WeightedGraph, a_fraction: float) -> ABProfile:
    """b(v) = weight share of the ceil(a n(v)) heaviest edges of v.

    Also checks sum_x sqrt(A_xv) <= sqrt(gamma) sqrt(n(v) d(v)) at every node.
    """
    if not 0.0 < a_fraction <= 1.0:
        raise ValueError("a must lie in (0, 1]")
    counts = g.neighbor_counts
    nz = counts > 0
    # guard against a*n landing one ulp above an integer
    k = np.ceil(a_fraction * counts - 1e-9).astype(np.int64)
    k = np.clip(k, 1, None)
    csum = np.concatenate([[0.0], np.cumsum(g.weights)])
    heavy = csum[g.offsets[:-1] + np.minimum(k, counts)] - csum[g.offsets[:-1]]
    b = np.full(g.n, np.nan)
    a_eff = np.full(g.n, np.nan)
    gam = np.full(g.n, np.nan)
    b[nz] = np.clip(heavy[nz] / g.degrees[nz], 0.0, 1.0)
    a_eff[nz] = k[nz] / counts[nz]
    gam[nz] = (np.sqrt(a_eff[nz] * b[nz])
               + np.sqrt(np.clip((1 - a_eff[nz]) * (1 - b[nz]), 0, None))) ** 2
    lhs = g.per_node_sqrt_sum[nz]
    rhs = np.sqrt(gam[nz]) * np.sqrt(counts[nz] * g.degrees[nz])
    viol = float((lhs - rhs - 1e-9 * np.maximum(1.0, rhs)).max()) if nz.any() else -1.0
    return ABProfile(a_fraction, b, a_eff, gam, viol)


def expected_l1_cost(g: WeightedGraph, alpha: float, epsilon: float) -> float:
    """Edge-push bound summed over edges, averaged over degree-distributed sources.

    With theta = eps sqrt(A)/S and E[pi(u)] = d(u)/||A||_1 this collapses to
    (1 - alpha) S^2 / (alpha eps ||A||_1) = (1 - alpha) 2m cos^2 phi / (alpha eps).
    """
    return (1.0 - alpha) * g.sqrt_weight_sum ** 2 / (alpha * epsilon * g.total_weight)


@dataclass
class UnbalanceReport:
    n: int
    m: int
    cos2_phi: float
    mean_node_cos2: float  # sum_v n(v) cos^2 phi_v / 2m
    per_node_cos2: list = field(repr=False)
    ab_profile: list

    def to_json(self, indent: int | None = 2) -> str:
        d = asdict(self)
        d["per_node_cos2"] = [None if math.isnan(x) else x for x in d["per_node_cos2"]]
        return json.dumps(d, indent=indent)


def unbalance_report(g: WeightedGraph, a_values=DEFAULT_A) -> UnbalanceReport:
    profile = []
    for a in a_values:
        p = ab_unbalance(g, a)
        nz = ~np.isnan(p.b)
        profile.append({"a": a, "min_b": float(np.min(p.b[nz])),
                        "mean_b": float(np.mean(p.b[nz])),
                        "max_gamma": float(np.max(p.gamma[nz])),
                        "bound_holds": p.holds})
    return UnbalanceReport(g.n, g.m, cos2_phi(g), mean_cos2(g),
                           per_node_cos2(g).tolist(), profile)
