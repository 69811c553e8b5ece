from __future__ import annotations

import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from edgepush.graph import WeightedGraph


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4, wlo: float = 0.1,
                 whi: float = 100.0, connected: bool = True) -> WeightedGraph:
    """Erdos-Renyi graph with log-uniform weights; a random spanning tree keeps it connected."""
    adj = np.triu(rng.random((n, n)) < p, 1)
    if connected:
        perm = rng.permutation(n)
        for i in range(1, n):
            a, b = sorted((perm[i], perm[rng.integers(0, i)]))
            adj[a, b] = True
    u, v = np.nonzero(adj)
    w = np.exp(rng.uniform(np.log(wlo), np.log(whi), len(u)))
    return WeightedGraph.from_edges(u, v, w, n=n)


def two_node() -> WeightedGraph:
    return WeightedGraph.from_edges([0], [1], [1.0])


def path4() -> WeightedGraph:
    # a-b(3), b-c(1), c-d(3)
    return WeightedGraph.from_edges([0, 1, 2], [1, 2, 3], [3.0, 1.0, 3.0])


@st.composite
def graphs(draw, min_n: int = 2, max_n: int = 12):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(min_n, max_n))
    p = draw(st.floats(0.1, 0.9))
    return random_graph(np.random.default_rng(seed), n, p)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance")
        for num in sorted(results):
            terminalreporter.write_line(results[num])
