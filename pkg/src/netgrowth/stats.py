"""Snapshot statistics of a growing graph and their trajectories.

Covers the degree-fraction, extreme-degree, assortativity and clustering
measures used to compare generated networks against a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NetgrowthError
from .graph import EvolvingGraph
from .trace import GrowthTrace, apply_event

TRANSITIVITY = "transitivity"
LOCAL_MEAN = "local-mean"


class EmptyGraphError(NetgrowthError):
    pass


@dataclass
class SnapshotStats:
    nodes: int
    edges: int
    d1: float                 # fraction of degree-1 nodes
    d2: float                 # fraction of degree-2 nodes
    max_degree: int
    mean_degree: float
    mean_square_degree: float
    assortativity: float      # nan when degree variance over edges is zero
    clustering: float

    CSV_HEADER = (
        "edges,nodes,d1,d2,max_degree,mean_degree,mean_square_degree,"
        "assortativity,clustering"
    )

    def csv_row(self) -> str:
        def fmt(x):
            return "nan" if isinstance(x, float) and math.isnan(x) else repr(float(x))

        return (
            f"{self.edges},{self.nodes},{fmt(self.d1)},{fmt(self.d2)},"
            f"{self.max_degree},{fmt(self.mean_degree)},{fmt(self.mean_square_degree)},"
            f"{fmt(self.assortativity)},{fmt(self.clustering)}"
        )


def assortativity(graph: EvolvingGraph) -> float:
    """Pearson correlation of end-point degrees over both edge orientations.

    Returns nan on degree-regular graphs (zero variance), never a silent 0.
    """
    deg = graph.degrees
    us, vs = [], []
    for u, v in graph.edges():
        us.append(u)
        vs.append(v)
    a = np.concatenate([deg[us], deg[vs]]).astype(float)
    b = np.concatenate([deg[vs], deg[us]]).astype(float)
    va = a - a.mean()
    vb = b - b.mean()
    denom = math.sqrt(float(va @ va) * float(vb @ vb))
    if denom == 0.0:
        return math.nan
    return float(va @ vb) / denom


def clustering(graph: EvolvingGraph, kind: str = TRANSITIVITY) -> float:
    """Global transitivity 3*triangles / connected triples, or the mean of
    local coefficients (nodes of degree < 2 contribute 0)."""
    deg = graph.degrees.astype(float)
    tri = graph.triangles.astype(float)
    triples = deg * (deg - 1.0) / 2.0
    if kind == TRANSITIVITY:
        total = triples.sum()
        return float(tri.sum() / total) if total > 0 else 0.0
    if kind == LOCAL_MEAN:
        local = np.divide(tri, triples, out=np.zeros_like(tri), where=triples > 0)
        return float(local.mean()) if len(local) else 0.0
    raise ValueError(f"unknown clustering kind {kind!r}")


def snapshot(graph: EvolvingGraph, clustering_kind: str = TRANSITIVITY) -> SnapshotStats:
    if graph.edge_count == 0:
        raise EmptyGraphError("snapshot requires at least one edge")
    deg = graph.degrees
    n = graph.node_count
    return SnapshotStats(
        nodes=n,
        edges=graph.edge_count,
        d1=float((deg == 1).sum() / n),
        d2=float((deg == 2).sum() / n),
        max_degree=int(deg.max()),
        mean_degree=float(deg.mean()),
        mean_square_degree=float((deg.astype(float) ** 2).mean()),
        assortativity=assortativity(graph),
        clustering=clustering(graph, clustering_kind),
    )


def trajectory(
    trace: GrowthTrace,
    sample_every: int,
    clustering_kind: str = TRANSITIVITY,
) -> list[tuple[int, SnapshotStats]]:
    """Snapshots along a replay: at the seed boundary, every
    ``sample_every`` event edges, and at the final state."""
    if sample_every < 1:
        raise ValueError("sample interval must be >= 1")
    graph = trace.seed_graph()
    points = [(graph.edge_count, snapshot(graph, clustering_kind))]
    for i, event in enumerate(trace.events, start=1):
        apply_event(graph, event)
        if i % sample_every == 0:
            points.append((graph.edge_count, snapshot(graph, clustering_kind)))
    if not trace.events or len(trace.events) % sample_every != 0:
        points.append((graph.edge_count, snapshot(graph, clustering_kind)))
    return points


def trajectory_csv(points: list[tuple[int, SnapshotStats]]) -> str:
    lines = [SnapshotStats.CSV_HEADER]
    lines.extend(s.csv_row() for _, s in points)
    return "\n".join(lines) + "\n"
