from __future__ import annotations

import numpy as np
import pytest

from edgepush.generators import (AffinityConfig, affinity_from_points, affinity_graph,
                                 motif_weight, unbalanced_star_graph)
from edgepush.graph import WeightedGraph
from edgepush.unbalance import cos2_phi

from .conftest import random_graph


def _complete(n):
    iu, ju = np.triu_indices(n, 1)
    return WeightedGraph.from_edges(iu, ju)


def _weight_map(g):
    return {(int(u), int(v)): float(w) for u, v, w in zip(g.sources, g.neighbors, g.weights)}


def test_triangle_and_k4():
    assert motif_weight(_complete(3)).weights.tolist() == [1.0] * 6
    assert motif_weight(_complete(4)).weights.tolist() == [2.0] * 12


def test_path_has_no_triangles():
    with pytest.warns(RuntimeWarning):
        g = motif_weight(WeightedGraph.from_edges([0, 1], [1, 2]))
    assert g.m == 0 and g.n == 3


def _brute_triangles(g):
    adj = g.to_dense() > 0
    out = {}
    for u, v in zip(*np.nonzero(adj)):
        c = sum(adj[u, w] and adj[v, w] for w in range(g.n))
        if c:
            out[(int(u), int(v))] = float(c)
    return out


def test_motif_matches_triple_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(3, 16))
        g = random_graph(rng, n, float(rng.uniform(0.2, 0.8)))
        h = motif_weight(g) if _brute_triangles(g) else None
        if h is None:
            continue
        assert _weight_map(h) == _brute_triangles(g)
        # relabelling commutes with triangle counting
        perm = rng.permutation(n)
        iu, ju = g.sources, g.neighbors
        keep = iu < ju
        g2 = WeightedGraph.from_edges(perm[iu[keep]], perm[ju[keep]], n=n)
        h2 = _weight_map(motif_weight(g2))
        assert h2 == {(int(perm[u]), int(perm[v])): w for (u, v), w in _weight_map(h).items()}


def test_motif_ignores_input_weights():
    g = WeightedGraph.from_edges([0, 1, 2], [1, 2, 0], [5.0, 0.1, 3.0])
    assert motif_weight(g).weights.tolist() == [1.0] * 6


def test_affinity_examples():
    g = affinity_from_points(np.zeros((2, 1)), 1.0)
    assert g.weights.tolist() == [1.0, 1.0]
    s = 2.0
    g = affinity_from_points(np.array([[0.0], [s]]), s * s)
    assert g.weights[0] == pytest.approx(np.exp(-0.5), abs=1e-15)


def test_affinity_symmetric_and_in_unit_interval():
    g = affinity_graph(AffinityConfig(n_points=300, dim=3, coord_var=5.0, rng_seed=4))
    a = g.to_dense()
    assert np.array_equal(a, a.T)
    w = g.weights
    assert (w > 0).all() and (w <= 1).all()
    assert g.m == 300 * 299 // 2
    g.validate()


def test_affinity_blocked_build_matches_dense_formula():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(600, 2))  # more rows than one block
    g = affinity_from_points(x, 1.7)
    d2 = ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1)
    want = np.exp(-d2 / 3.4)
    np.fill_diagonal(want, 0.0)
    np.testing.assert_allclose(g.to_dense(), want, rtol=1e-12, atol=0)


def test_affinity_reproducible():
    cfg = AffinityConfig(n_points=200, dim=2, rng_seed=9)
    a, b = affinity_graph(cfg), affinity_graph(cfg)
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.neighbors, b.neighbors)
    c = affinity_graph(AffinityConfig(n_points=200, dim=2, rng_seed=10))
    assert not np.array_equal(a.weights, c.weights)


def test_affinity_bandwidth_modes():
    cfg = AffinityConfig(n_points=10, dim=4, coord_var=2.0, c=0.5)
    assert cfg.sigma2(np.zeros((10, 4))) == 4.0
    assert AffinityConfig(n_points=10, dim=4, coord_var=2.0, d2=16).sigma2(None) == 32.0
    pts = np.array([[0.0, 0.0], [2.0, 4.0]])
    emp = AffinityConfig(n_points=2, dim=2, bandwidth_mode="empirical_variance", c=2.0)
    assert emp.sigma2(pts) == pytest.approx(2.0 * (1.0 + 4.0))


@pytest.mark.parametrize("kw", [dict(n_points=1), dict(n_points=5, dim=0),
                                dict(n_points=5, coord_var=0.0), dict(n_points=5, c=-1.0),
                                dict(n_points=5, bandwidth_mode="knn"),
                                dict(n_points=50, max_points=10)])
def test_affinity_config_rejects(kw):
    with pytest.raises(ValueError):
        AffinityConfig(**kw)


def test_star_weights():
    g = unbalanced_star_graph(4, 0.7)
    hub = g.edge_range(0)
    assert g.weights[hub] == pytest.approx([0.7, 0.1, 0.1, 0.1])
    assert g.degrees[0] == pytest.approx(1.0)
    assert g.n == 5 and g.m == 4


def test_star_unbalance():
    n = 10 ** 4
    assert cos2_phi(unbalanced_star_graph(n)) <= 10 / n
    assert cos2_phi(unbalanced_star_graph(5, 0.2)) == pytest.approx(1.0, abs=1e-12)


def test_star_tail_and_errors():
    g = unbalanced_star_graph(5, tail_weight=2.0)
    assert g.n == 7 and g.degree(6) == 2.0
    for args in ((2,), (5, 1.0), (5, 0.0)):
        with pytest.raises(ValueError):
            unbalanced_star_graph(*args)
    with pytest.raises(ValueError):
        unbalanced_star_graph(5, 0.5, -1.0)


def test_generated_graphs_are_valid():
    for g in (unbalanced_star_graph(7, 0.4), motif_weight(_complete(6)),
              affinity_graph(AffinityConfig(n_points=40, rng_seed=1))):
        g.validate()
        for u in range(g.n):
            w = g.weights[g.edge_range(u)]
            assert (np.diff(w) <= 0).all()
