"""Mutable growing-graph state with incremental bookkeeping.

Maintains, per node: adjacency set, degree, triangle count (number of
3-cycles the node belongs to) and a history of attachment selections.
All counters are updated incrementally on edge insertion so model
evaluation never rescans the graph.
"""

from __future__ import annotations

import numpy as np

from .errors import DuplicateEdgeError, SelfLoopError, UnknownNodeError

_INITIAL_CAPACITY = 16


class EvolvingGraph:
    """Simple undirected graph that only ever grows.

    Node ids are dense integers assigned in arrival order. Degree and
    triangle counters are backed by numpy arrays (amortised doubling) so
    model components can be evaluated vectorised over candidate sets.

    Single-writer: mutations are not thread-safe; reads on a quiescent
    graph are.
    """

    __slots__ = ("_adj", "_degree", "_triangles", "_n", "_m", "selection_history")

    def __init__(self):
        self._adj: list[set[int]] = []
        self._degree = np.zeros(_INITIAL_CAPACITY, dtype=np.int64)
        self._triangles = np.zeros(_INITIAL_CAPACITY, dtype=np.int64)
        self._n = 0
        self._m = 0
        self.selection_history: list[int] = []

    # -- queries --------------------------------------------------------

    @property
    def node_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return self._m

    @property
    def degrees(self) -> np.ndarray:
        """Degree array for nodes 0..n-1 (a view; do not mutate)."""
        return self._degree[: self._n]

    @property
    def triangles(self) -> np.ndarray:
        """Per-node triangle counts for nodes 0..n-1 (a view)."""
        return self._triangles[: self._n]

    def degree(self, i: int) -> int:
        self._check_node(i)
        return int(self._degree[i])

    def triangle_count(self, i: int) -> int:
        self._check_node(i)
        return int(self._triangles[i])

    def neighbors(self, i: int) -> set[int]:
        self._check_node(i)
        return set(self._adj[i])

    def neighbors_view(self, i: int) -> set[int]:
        """The live adjacency set of ``i``; callers must not mutate it."""
        self._check_node(i)
        return self._adj[i]

    def has_edge(self, u: int, v: int) -> bool:
        self._check_node(u)
        self._check_node(v)
        return v in self._adj[u]

    def edges(self):
        """Iterate undirected edges as (u, v) with u < v."""
        for u, nbrs in enumerate(self._adj):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    # -- mutation ---------------------------------------------------------

    def add_node(self) -> int:
        nid = self._n
        self._adj.append(set())
        if nid >= self._degree.shape[0]:
            self._degree = np.concatenate([self._degree, np.zeros_like(self._degree)])
            self._triangles = np.concatenate([self._triangles, np.zeros_like(self._triangles)])
        self._degree[nid] = 0
        self._triangles[nid] = 0
        self._n += 1
        return nid

    def add_edge(self, u: int, v: int) -> None:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise SelfLoopError(f"self-loop at node {u}")
        if v in self._adj[u]:
            raise DuplicateEdgeError(f"edge ({u}, {v}) already present")
        # common neighbours before insertion close one new triangle each
        a, b = self._adj[u], self._adj[v]
        if len(b) < len(a):
            a, b = b, a
        common = [w for w in a if w in b]
        if common:
            k = len(common)
            self._triangles[u] += k
            self._triangles[v] += k
            for w in common:
                self._triangles[w] += 1
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._degree[u] += 1
        self._degree[v] += 1
        self._m += 1

    def record_selection(self, i: int) -> None:
        self._check_node(i)
        self.selection_history.append(i)

    def recent_set(self, n: int) -> set[int]:
        """Distinct node ids among the last ``n`` recorded selections."""
        if n < 1:
            raise ValueError("window size must be >= 1")
        if not self.selection_history:
            return set()
        return set(self.selection_history[-n:])

    def copy(self) -> "EvolvingGraph":
        g = EvolvingGraph.__new__(EvolvingGraph)
        g._adj = [set(s) for s in self._adj]
        g._degree = self._degree.copy()
        g._triangles = self._triangles.copy()
        g._n = self._n
        g._m = self._m
        g.selection_history = list(self.selection_history)
        return g

    # -- internals --------------------------------------------------------

    def _check_node(self, i: int) -> None:
        if not (0 <= i < self._n):
            raise UnknownNodeError(f"node {i} does not exist (graph has {self._n} nodes)")


def triangle_graph() -> EvolvingGraph:
    """Smallest seed giving the triangle component nonzero support."""
    g = EvolvingGraph()
    for _ in range(3):
        g.add_node()
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    g.add_edge(2, 0)
    return g
