"""Synthetic network growth from an operation driver plus attachment models.

The driver decides which structural operation happens next; the node and
edge models pick the nodes, sampled over exactly the same constrained
choice sets the likelihood replay uses, so a generated trace never
contains a zero-probability choice under its own generating model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDistributionError, ExhaustedChoiceSetError
from .graph import EvolvingGraph
from .likelihood import (
    SIMPLE,
    attach_candidates,
    inner_start_candidates,
    new_node_candidates,
)
from .models import Component, InnerModel, component_prob_matrix, parse_model
from .trace import EventKind, GrowthTrace, OuterEvent

_PROB_SUM_TOL = 1e-9


def weighted_sample(probs: dict[int, float] | None, rng, candidates=None, p=None) -> int:
    """Draw one node by cumulative-sum inversion.

    Accepts either a node-id -> probability map or parallel
    ``candidates``/``p`` arrays. Probabilities must sum to 1 within 1e-9.
    """
    if probs is not None:
        candidates = np.fromiter(probs.keys(), dtype=np.int64, count=len(probs))
        p = np.fromiter(probs.values(), dtype=float, count=len(probs))
    cum = np.cumsum(p)
    if len(cum) == 0 or abs(cum[-1] - 1.0) > _PROB_SUM_TOL or np.any(p < 0.0):
        raise DegenerateDistributionError("probabilities do not form a distribution")
    idx = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    idx = min(idx, len(cum) - 1)
    return int(candidates[idx])


# -- outer-model drivers --------------------------------------------------------


@dataclass
class FixedAttach:
    """Every new node connects to exactly ``m`` distinct existing nodes."""

    m: int
    stochastic: bool = field(default=False, init=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("FixedAttach needs m >= 1")
        self._left = 0

    def next_kind(self, rng) -> EventKind:
        if self._left == 0:
            self._left = self.m
        if self._left == self.m:
            self._left -= 1
            return EventKind.NEW_NODE_EDGE
        self._left -= 1
        return EventKind.NEWEST_NODE_EDGE


@dataclass
class RandomAttach:
    """Every new node connects to a random count of nodes (equal probability)."""

    counts: tuple[int, ...]
    stochastic: bool = field(default=True, init=False)

    def __post_init__(self):
        if not self.counts or any(c < 1 for c in self.counts):
            raise ValueError("RandomAttach counts must be positive")
        self._left = 0
        self._fresh = False

    def next_kind(self, rng) -> EventKind:
        if self._left == 0:
            self._left = int(rng.choice(self.counts))
            self._fresh = True
        self._left -= 1
        if self._fresh:
            self._fresh = False
            return EventKind.NEW_NODE_EDGE
        return EventKind.NEWEST_NODE_EDGE


@dataclass
class Mixed:
    """Independent per-event distribution over the three operation kinds."""

    probs: dict[EventKind, float]
    stochastic: bool = field(default=True, init=False)

    def __post_init__(self):
        total = sum(self.probs.values())
        if abs(total - 1.0) > _PROB_SUM_TOL or any(p < 0 for p in self.probs.values()):
            raise ValueError("operation probabilities must sum to 1")

    def next_kind(self, rng) -> EventKind:
        kinds = list(self.probs.keys())
        p = np.fromiter(self.probs.values(), dtype=float)
        return kinds[int(rng.choice(len(kinds), p=p / p.sum()))]


@dataclass
class Replay:
    """Deterministic event-kind sequence taken from an existing trace."""

    kinds: list[EventKind]
    stochastic: bool = field(default=False, init=False)

    def __post_init__(self):
        if not self.kinds:
            raise ValueError("Replay needs a non-empty kind sequence")
        self._i = 0

    def next_kind(self, rng) -> EventKind:
        if self._i >= len(self.kinds):
            raise ExhaustedChoiceSetError("replay kind sequence exhausted")
        kind = self.kinds[self._i]
        self._i += 1
        return kind


DEFAULT_SEED_EDGES = [(0, 1), (1, 2), (2, 0)]  # triangle


def grow(
    driver,
    node_model: InnerModel,
    edge_model: InnerModel | None = None,
    target_edges: int = 1000,
    rng=None,
    seed_edges: list[tuple[int, int]] | None = None,
    comments: list[str] | None = None,
) -> GrowthTrace:
    """Grow a network until ``target_edges`` total edges and return its trace.

    ``target_edges`` counts the seed edges. Identical inputs and rng seed
    give a bit-identical trace.
    """
    node_model.require_valid()
    edge_model = edge_model if edge_model is not None else node_model
    edge_model.require_valid()
    if rng is None or isinstance(rng, int):
        rng = np.random.default_rng(rng)
    seed_edges = list(seed_edges) if seed_edges is not None else list(DEFAULT_SEED_EDGES)

    graph = EvolvingGraph()
    for u, v in seed_edges:
        while graph.node_count <= max(u, v):
            graph.add_node()
        graph.add_edge(u, v)

    node_comps = node_model.components
    node_beta = np.asarray(node_model.weights)
    edge_comps = edge_model.components
    edge_beta = np.asarray(edge_model.weights)

    def pick(comps, beta, cands) -> int:
        probs = beta @ component_prob_matrix(comps, cands, graph)
        return weighted_sample(None, rng, candidates=cands, p=probs)

    events: list[OuterEvent] = []
    retries = 0
    while graph.edge_count < target_edges:
        kind = driver.next_kind(rng)
        try:
            if kind is EventKind.NEW_NODE_EDGE:
                cands = new_node_candidates(graph, SIMPLE)
                target = pick(node_comps, node_beta, cands)
                nid = graph.add_node()
                graph.add_edge(nid, target)
                graph.record_selection(target)
                events.append(OuterEvent(kind, nid, target))
            elif kind is EventKind.NEWEST_NODE_EDGE:
                src = graph.node_count - 1
                cands = attach_candidates(graph, src, SIMPLE)
                if len(cands) == 0:
                    raise ExhaustedChoiceSetError("newest node already connects everywhere")
                target = pick(node_comps, node_beta, cands)
                graph.add_edge(src, target)
                graph.record_selection(target)
                events.append(OuterEvent(kind, src, target))
            else:
                # an inner edge must avoid the newest node: trace event kinds
                # are inferred on re-parse, and any edge touching the newest
                # node reads back as a newest-node event
                newest = graph.node_count - 1
                s1 = inner_start_candidates(graph, SIMPLE)
                s1 = s1[s1 != newest]
                if len(s1) == 0:
                    raise ExhaustedChoiceSetError("no eligible inner-edge start node")
                x = pick(edge_comps, edge_beta, s1)
                s2 = attach_candidates(graph, x, SIMPLE)
                s2 = s2[s2 != newest]
                if len(s2) == 0:
                    raise ExhaustedChoiceSetError("no eligible inner-edge end node")
                y = pick(edge_comps, edge_beta, s2)
                graph.add_edge(x, y)
                graph.record_selection(x)
                graph.record_selection(y)
                events.append(OuterEvent(EventKind.INNER_EDGE, x, y))
            retries = 0
        except ExhaustedChoiceSetError:
            if not driver.stochastic or retries >= 100:
                raise
            retries += 1

    labels = [str(i) for i in range(graph.node_count)]
    return GrowthTrace(labels, seed_edges, events, list(comments or []))


# -- experiment presets -----------------------------------------------------------


@dataclass
class Preset:
    driver_factory: object
    node_model: str
    description: str

    def make_driver(self):
        return self.driver_factory()


PRESETS = {
    # new node attaches to exactly three distinct nodes;
    # half positive-feedback preference (0.05), half triangle affinity
    "paper-theta1": Preset(
        lambda: FixedAttach(3),
        "0.5*pfp(0.05),0.5*triangle",
        "attach-3 outer model, 0.5*pfp(0.05) + 0.5*triangle",
    ),
    # new node attaches to one or two distinct nodes (equal probability);
    # equal mix of uniform, triangle, degree-1 and degree-2 affinity
    "paper-theta2": Preset(
        lambda: RandomAttach((1, 2)),
        "0.25*null,0.25*triangle,0.25*singleton,0.25*doubleton",
        "attach-1-or-2 outer model, equal null/triangle/singleton/doubleton mix",
    ),
}


def grow_preset(name: str, target_edges: int, rng=None, **kwargs) -> GrowthTrace:
    preset = PRESETS[name]
    model = parse_model(preset.node_model)
    return grow(preset.make_driver(), model, target_edges=target_edges, rng=rng, **kwargs)
