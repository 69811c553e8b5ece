from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgepush.evaluation import (conductance, evaluate, l1_error, max_add_err,
                                 normalized_max_add_err, precision_at_k, sweep_cut)
from edgepush.graph import WeightedGraph
from edgepush.localpush import localpush
from edgepush.oracle import exact_ppr

from .conftest import graphs, path4, two_node


def test_identical_vectors():
    g = path4()
    x = exact_ppr(g, 0, 0.2).values
    assert l1_error(x, x) == max_add_err(x, x) == normalized_max_add_err(g, x, x) == 0.0
    assert precision_at_k(x, x, 3) == 1.0


def test_two_node_trace_error():
    g = two_node()
    est, _ = localpush(g, 0, 0.2, 0.3)
    assert l1_error(est, exact_ppr(g, 0, 0.2)) == pytest.approx(0.262144, abs=1e-12)


def test_add_err_arithmetic():
    g = WeightedGraph.from_edges([0, 0], [1, 2], [1.0, 1.0])  # degrees (2, 1, 1)
    truth = np.array([0.5, 0.5, 0.0])
    est = np.array([0.4, 0.5, 0.0])
    assert max_add_err(est, truth) == pytest.approx(0.1)
    assert normalized_max_add_err(g, est, truth) == pytest.approx(0.05)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        l1_error([1.0], [1.0, 0.0])


def test_precision_examples():
    truth = np.array([0.5, 0.3, 0.2])
    est = np.array([0.5, 0.2, 0.3])
    assert precision_at_k(est, truth, 2) == 0.5
    with pytest.warns(RuntimeWarning):
        assert precision_at_k(np.zeros(3), truth, 5) == 1.0
    with pytest.raises(ValueError):
        precision_at_k(est, truth, 0)


def test_precision_tie_rule():
    truth = np.array([0.1, 0.1, 0.1, 0.7])
    est = np.array([0.0, 0.2, 0.2, 0.6])
    # truth top-2: {3, 0} by id; est top-2: {3, 1}
    assert precision_at_k(est, truth, 2) == 0.5


def _reference_top(v, k):
    return set(sorted(range(len(v)), key=lambda i: (-v[i], i))[:k])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=3, max_size=12), st.integers(0, 2 ** 31),
       st.integers(1, 12))
def test_precision_fully_determined_by_values_and_ids(vals, seed, k):
    rng = np.random.default_rng(seed)
    truth = np.array(vals, dtype=float)
    est = rng.integers(0, 4, len(vals)).astype(float)
    k = min(k, len(vals))
    want = len(_reference_top(est, k) & _reference_top(truth, k)) / k
    assert precision_at_k(est, truth, k) == want
    # relabelling nodes by a permutation leaves the score unchanged when values are distinct
    est_d, truth_d = est + np.arange(len(est)) * 1e-3, truth + rng.random(len(truth)) * 1e-3
    perm = rng.permutation(len(vals))
    assert precision_at_k(est_d[perm], truth_d[perm], k) == precision_at_k(est_d, truth_d, k)


def test_path_conductance():
    g = path4()
    assert conductance(g, [0, 1]) == pytest.approx(1 / 7)
    assert conductance(two_node(), [0]) == 1.0


def test_sweep_on_exact_ppr_matches_enumeration():
    g = path4()
    pi = exact_ppr(g, 0, 0.2).values
    sw = sweep_cut(g, pi)
    assert sw.best_size == 2
    assert sw.best_conductance == pytest.approx(1 / 7)
    brute = [conductance(g, sw.order[:i]) for i in range(1, g.n + 1)]
    np.testing.assert_allclose(sw.conductance, brute, atol=1e-12)


def test_sweep_all_zero_rejected():
    with pytest.raises(ValueError):
        sweep_cut(path4(), np.zeros(4))


@settings(max_examples=50, deadline=None)
@given(graphs(max_n=14), st.integers(0, 2 ** 31))
def test_sweep_incremental_matches_scratch(g, seed):
    est = np.random.default_rng(seed).random(g.n)
    sw = sweep_cut(g, est)
    for i in range(len(sw.order)):
        want = conductance(g, sw.order[:i + 1])
        if np.isnan(want):
            assert np.isnan(sw.conductance[i])
        else:
            assert sw.conductance[i] == pytest.approx(want, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(graphs(max_n=10), st.integers(0, 2 ** 31))
def test_conductance_complement_symmetry(g, seed):
    mask = np.random.default_rng(seed).random(g.n) < 0.5
    s, t = np.flatnonzero(mask), np.flatnonzero(~mask)
    if len(s) and len(t):
        assert conductance(g, s) == pytest.approx(conductance(g, t), abs=1e-12)


def test_sweep_best_is_global_min_of_prefixes():
    g = path4()
    pi = exact_ppr(g, 0, 0.2).values
    sw = sweep_cut(g, pi)
    subsets = [c for r in range(1, 4) for c in itertools.combinations(range(4), r)]
    prefix_sets = [set(sw.order[:i].tolist()) for i in range(1, 4)]
    best = min(conductance(g, c) for c in subsets if set(c) in prefix_sets)
    assert sw.best_conductance == pytest.approx(best)


def test_evaluate_report():
    g = path4()
    pi = exact_ppr(g, 0, 0.2).values
    rep = evaluate(g, pi, pi, k=2)
    assert rep.l1_error == 0 and rep.precision_at_k == 1 and rep.best_sweep_set_size == 2
