"""Growth-trace parsing, writing and event classification.

A trace file is UTF-8 text: '#' comment lines, a ``SEED`` marker followed
by one ``u v`` edge per line, then an ``EVENTS`` marker followed by
arrival-ordered ``u v`` edges. Event kinds are inferred, never stored.
"""

from __future__ import annotations

import enum
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    BothEndpointsNewError,
    DuplicateEdgeError,
    GraphError,
    SelfLoopError,
    TraceError,
    TraceSyntaxError,
)
from .graph import EvolvingGraph


class EventKind(enum.Enum):
    NEW_NODE_EDGE = "new_node_edge"      # new node attaches to an existing node
    NEWEST_NODE_EDGE = "newest_node_edge"  # most recent node gains another edge
    INNER_EDGE = "inner_edge"            # edge between two older existing nodes


@dataclass(frozen=True)
class OuterEvent:
    kind: EventKind
    source: int  # dense node id; the new/newest node, or the first endpoint
    target: int


@dataclass
class GrowthTrace:
    """Seed graph plus ordered growth events, with dense node ids.

    ``labels[i]`` is the external label of dense node id ``i`` (ids follow
    first-appearance order across seed then events).
    """

    labels: list[str]
    seed_edges: list[tuple[int, int]]
    events: list[OuterEvent]
    comments: list[str] = field(default_factory=list)

    @property
    def total_edges(self) -> int:
        return len(self.seed_edges) + len(self.events)

    def seed_graph(self) -> EvolvingGraph:
        """Build the seed graph G0 (no selections recorded)."""
        g = EvolvingGraph()
        for u, v in self.seed_edges:
            while g.node_count <= max(u, v):
                g.add_node()
            g.add_edge(u, v)
        return g

    def event_kinds(self) -> list[EventKind]:
        return [e.kind for e in self.events]


def classify_edge(graph: EvolvingGraph, u: int, v: int) -> OuterEvent:
    """Classify the next arrival-ordered edge against the current state.

    Dense-id convention: an endpoint is "new" iff its id equals the current
    node count. An edge touching the newest existing node is a
    newest-node event, not an inner edge.
    """
    n = graph.node_count
    u_new, v_new = u >= n, v >= n
    if u_new and v_new:
        raise BothEndpointsNewError(f"edge ({u}, {v}) has two unseen endpoints")
    if u_new or v_new:
        src, dst = (u, v) if u_new else (v, u)
        if src != n:
            raise TraceSyntaxError(f"node id {src} skips ids (expected {n})")
        return OuterEvent(EventKind.NEW_NODE_EDGE, src, dst)
    if u == v:
        raise SelfLoopError(f"self-loop at node {u}")
    if graph.has_edge(u, v):
        raise DuplicateEdgeError(f"edge ({u}, {v}) already present")
    newest = n - 1
    if u == newest or v == newest:
        src, dst = (u, v) if u == newest else (v, u)
        return OuterEvent(EventKind.NEWEST_NODE_EDGE, src, dst)
    return OuterEvent(EventKind.INNER_EDGE, u, v)


def apply_event(graph: EvolvingGraph, event: OuterEvent, record: bool = True) -> None:
    """Mutate the graph by one event, recording realised selections."""
    if event.kind is EventKind.NEW_NODE_EDGE:
        nid = graph.add_node()
        assert nid == event.source
        graph.add_edge(event.source, event.target)
        if record:
            graph.record_selection(event.target)
    elif event.kind is EventKind.NEWEST_NODE_EDGE:
        graph.add_edge(event.source, event.target)
        if record:
            graph.record_selection(event.target)
    else:
        graph.add_edge(event.source, event.target)
        if record:
            graph.record_selection(event.source)
            graph.record_selection(event.target)


def infer_events(seed_edges: list[tuple[int, int]], edges: list[tuple[int, int]]) -> list[OuterEvent]:
    """Classify arrival-ordered edges that follow the given seed."""
    g = EvolvingGraph()
    for u, v in seed_edges:
        while g.node_count <= max(u, v):
            g.add_node()
        g.add_edge(u, v)
    events = []
    for u, v in edges:
        ev = classify_edge(g, u, v)
        apply_event(g, ev, record=False)
        events.append(ev)
    return events


# -- text format ---------------------------------------------------------------


@contextmanager
def _line_context(lineno: int):
    """Re-raise trace/graph errors tagged with the offending line number."""
    try:
        yield
    except (TraceError, GraphError) as exc:
        if getattr(exc, "line", None) is not None:
            raise
        message = exc.args[0] if exc.args else str(exc)
        raise type(exc)(message, lineno) from None


def parse_trace(text: str) -> GrowthTrace:
    """Parse trace text, densifying labels in first-appearance order.

    All structural invariants are validated; errors carry the 1-based
    offending line number.
    """
    labels: list[str] = []
    ids: dict[str, int] = {}

    def densify(tok: str) -> int:
        if tok not in ids:
            ids[tok] = len(labels)
            labels.append(tok)
        return ids[tok]

    comments: list[str] = []
    seed_lines: list[tuple[int, int, int]] = []   # (u, v, line)
    event_lines: list[tuple[int, int, int]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if line == "SEED":
            if section is not None:
                raise TraceSyntaxError("duplicate SEED marker", lineno)
            section = "seed"
            continue
        if line == "EVENTS":
            if section != "seed":
                raise TraceSyntaxError("EVENTS marker before SEED", lineno)
            section = "events"
            continue
        if section is None:
            raise TraceSyntaxError("edge line before SEED marker", lineno)
        toks = line.split()
        if len(toks) != 2:
            raise TraceSyntaxError(f"expected two labels, got {len(toks)}", lineno)
        u, v = densify(toks[0]), densify(toks[1])
        if section == "seed":
            seed_lines.append((u, v, lineno))
        else:
            event_lines.append((u, v, lineno))

    if section is None:
        raise TraceSyntaxError("missing SEED marker", 1)

    # replay the whole trace to validate simplicity and event structure
    g = EvolvingGraph()
    seed_edges: list[tuple[int, int]] = []
    for u, v, lineno in seed_lines:
        while g.node_count <= max(u, v):
            g.add_node()
        with _line_context(lineno):
            g.add_edge(u, v)
        seed_edges.append((u, v))
    events = []
    for u, v, lineno in event_lines:
        with _line_context(lineno):
            ev = classify_edge(g, u, v)
            apply_event(g, ev, record=False)
        events.append(ev)
    return GrowthTrace(labels, seed_edges, events, comments)


def write_trace(trace: GrowthTrace) -> str:
    """Canonical textual form; ``parse_trace`` inverts it."""
    lines = [f"# {c}".rstrip() for c in trace.comments]
    lines.append("SEED")
    lab = trace.labels
    lines.extend(f"{lab[u]} {lab[v]}" for u, v in trace.seed_edges)
    if trace.events:
        lines.append("EVENTS")
        lines.extend(f"{lab[e.source]} {lab[e.target]}" for e in trace.events)
    return "\n".join(lines) + "\n"


def read_trace(path) -> GrowthTrace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def write_trace_file(trace: GrowthTrace, path) -> None:
    Path(path).write_text(write_trace(trace), encoding="utf-8")
