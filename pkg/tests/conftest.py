"""Shared fixtures and the acceptance-summary terminal section."""

import numpy as np
import pytest

from netgrowth.graph import EvolvingGraph, triangle_graph

# one "criterion N (...): PASS/FAIL" line per acceptance test
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def triangle():
    return triangle_graph()


def random_graph(rng, max_nodes=30, p=0.2) -> EvolvingGraph:
    """Small Erdos-Renyi-style graph for oracle comparisons."""
    n = int(rng.integers(2, max_nodes + 1))
    g = EvolvingGraph()
    for _ in range(n):
        g.add_node()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                g.add_edge(u, v)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
