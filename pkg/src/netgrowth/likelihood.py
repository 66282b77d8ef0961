"""Exact log-likelihood of observed growth choices under a candidate model.

A trace is replayed once per candidate-component set; for every observed
choice the per-component probability of the chosen node is cached. Any
mixture over those components (and in particular every point of a grid
sweep) is then evaluated by cheap vector arithmetic, without replaying.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChosenNotInChoiceSetError,
    EmptyChoiceSetError,
    InvalidModelError,
    MismatchedTracesError,
    ZeroProbabilityError,
)
from .graph import EvolvingGraph
from .models import Component, InnerModel, parse_model, probability_array
from .trace import EventKind, GrowthTrace, apply_event

SIMPLE = "simple"
ALL = "all"


# -- shared choice-set construction (generator and fitter use these too) ------


def new_node_candidates(graph: EvolvingGraph, mode: str = SIMPLE) -> np.ndarray:
    """Candidates for the node a brand-new node attaches to: every existing node."""
    return np.arange(graph.node_count, dtype=np.int64)


def attach_candidates(graph: EvolvingGraph, source: int, mode: str = SIMPLE) -> np.ndarray:
    """Candidates for an additional edge from ``source``.

    Simple mode excludes the source and its current neighbours; 'all' mode
    only excludes the source itself.
    """
    mask = np.ones(graph.node_count, dtype=bool)
    mask[source] = False
    if mode == SIMPLE:
        nbrs = graph.neighbors_view(source)
        if nbrs:
            mask[list(nbrs)] = False
    return np.flatnonzero(mask)


def inner_start_candidates(graph: EvolvingGraph, mode: str = SIMPLE) -> np.ndarray:
    """Start-node candidates for an inner edge.

    Simple mode keeps nodes with at least one eligible (non-self,
    non-neighbour) end node, i.e. degree < n - 1.
    """
    n = graph.node_count
    if mode == SIMPLE:
        return np.flatnonzero(graph.degrees < n - 1)
    return np.arange(n, dtype=np.int64)


# -- replay cache ---------------------------------------------------------------


@dataclass
class ChoiceCache:
    """Per-choice, per-component chosen-node probabilities for one trace.

    ``node_q[j, k]`` is component k's probability of the node observed at
    single-node choice j. ``edge_q[e, f, k]`` holds the four factors of
    inner-edge event e: (x|S1), (y|S2(x)), (y|S1), (x|S2(y)).
    """

    components: list[Component]
    null_index: int
    node_q: np.ndarray
    edge_q: np.ndarray
    mode: str

    @property
    def choice_count(self) -> int:
        return self.node_q.shape[0] + 2 * self.edge_q.shape[0]

    def beta_for(self, model: InnerModel) -> np.ndarray:
        beta = np.zeros(len(self.components))
        for w, c in model.terms:
            try:
                beta[self.components.index(c)] += w
            except ValueError:
                raise InvalidModelError(
                    f"component {c.label()} is not in this cache"
                ) from None
        return beta

    def evaluate_beta(self, node_beta: np.ndarray, edge_beta: np.ndarray):
        """Return (log_likelihood, zero_probability_choice_count)."""
        zeros = 0
        ll = 0.0
        if self.node_q.shape[0]:
            p = self.node_q @ node_beta
            bad = p <= 0.0
            zeros += int(bad.sum())
            ll += float(np.log(p[~bad]).sum())
        if self.edge_q.shape[0]:
            f = self.edge_q @ edge_beta  # (t2, 4)
            p = f[:, 0] * f[:, 1] + f[:, 2] * f[:, 3]
            bad = p <= 0.0
            zeros += 2 * int(bad.sum())
            ll += float(np.log(p[~bad]).sum())
        if zeros:
            ll = -math.inf
        return ll, zeros


def _chosen_probs(components, candidates, chosen_idx, graph, out) -> None:
    """Fill ``out[k]`` with component k's normalised probability of the
    candidate at ``chosen_idx`` (uniform fallback on zero support)."""
    m = len(candidates)
    uniform = 1.0 / m
    for k, comp in enumerate(components):
        if comp.kind == "null":
            out[k] = uniform
            continue
        raw = comp.raw_vector(candidates, graph)
        total = raw.sum()
        out[k] = uniform if total <= 0.0 else raw[chosen_idx] / total


def _chosen_probs_all(components, graph, chosen, excluded, m, out) -> None:
    """Like ``_chosen_probs`` over the implicit candidate set of all nodes
    minus ``excluded``; avoids materialising the candidate array. The caller
    guarantees ``chosen`` is not excluded and ``m == n - len(excluded)``."""
    uniform = 1.0 / m
    for k, comp in enumerate(components):
        if comp.kind == "null":
            out[k] = uniform
            continue
        raw = comp.raw_all(graph)
        total = raw.sum()
        for e in excluded:
            total -= raw[e]
        out[k] = uniform if total <= 0.0 else raw[chosen] / total


def _index_of(candidates: np.ndarray, node: int) -> int:
    idx = int(np.searchsorted(candidates, node))
    if idx >= len(candidates) or candidates[idx] != node:
        raise ChosenNotInChoiceSetError(f"chosen node {node} not in the choice set")
    return idx


def build_choice_cache(
    trace: GrowthTrace,
    components: list[Component],
    mode: str = SIMPLE,
    seed_history: bool = False,
) -> ChoiceCache:
    """Replay a trace, caching every component's probability of each
    observed choice.

    ``seed_history``: whether seed-edge endpoints populate the selection
    history the recency component sees (off by default; the seed carries no
    observed choices).
    """
    comps = list(components)
    null = Component("null")
    if null not in comps:
        comps.append(null)
    null_index = comps.index(null)
    k = len(comps)

    graph = trace.seed_graph()
    if seed_history:
        for u, v in trace.seed_edges:
            graph.record_selection(u)
            graph.record_selection(v)

    node_rows = []
    edge_rows = []
    for event in trace.events:
        if event.kind is EventKind.INNER_EDGE:
            x, y = event.source, event.target
            s1 = inner_start_candidates(graph, mode)
            if len(s1) == 0:
                raise EmptyChoiceSetError("no eligible start node for inner edge")
            s2x = attach_candidates(graph, x, mode)
            s2y = attach_candidates(graph, y, mode)
            row = np.empty((4, k))
            _chosen_probs(comps, s1, _index_of(s1, x), graph, row[0])
            _chosen_probs(comps, s2x, _index_of(s2x, y), graph, row[1])
            _chosen_probs(comps, s1, _index_of(s1, y), graph, row[2])
            _chosen_probs(comps, s2y, _index_of(s2y, x), graph, row[3])
            edge_rows.append(row)
        else:
            n = graph.node_count
            chosen = event.target
            if event.kind is EventKind.NEW_NODE_EDGE:
                excluded: tuple[int, ...] = ()
            elif mode == SIMPLE:
                excluded = (event.source, *graph.neighbors_view(event.source))
            else:
                excluded = (event.source,)
            m = n - len(excluded)
            if m <= 0:
                raise EmptyChoiceSetError("empty choice set during replay")
            if not 0 <= chosen < n or chosen in excluded:
                raise ChosenNotInChoiceSetError(
                    f"chosen node {chosen} not in the choice set"
                )
            row = np.empty(k)
            _chosen_probs_all(comps, graph, chosen, excluded, m, row)
            node_rows.append(row)
        apply_event(graph, event)

    node_q = np.vstack(node_rows) if node_rows else np.empty((0, k))
    edge_q = np.stack(edge_rows) if edge_rows else np.empty((0, 4, k))
    return ChoiceCache(comps, null_index, node_q, edge_q, mode)


# -- reports --------------------------------------------------------------------


@dataclass
class LikelihoodReport:
    """Log-likelihood summary for one trace/model pair.

    Natural logs throughout. ``deviance`` is -2*l against the saturated
    baseline l = 0; ``null_deviance`` is -2*(l - l0) against the uniform
    model evaluated over identical choice sets in the same replay.
    """

    log_likelihood: float
    choice_count: int
    null_log_likelihood: float
    zero_probability_choices: int

    @property
    def deviance(self) -> float:
        return -2.0 * self.log_likelihood

    @property
    def null_deviance(self) -> float:
        return -2.0 * (self.log_likelihood - self.null_log_likelihood)

    @property
    def c0(self) -> float:
        """Per-choice likelihood ratio against the uniform model."""
        if self.zero_probability_choices:
            return math.nan
        if self.choice_count == 0:
            return 1.0
        return math.exp((self.log_likelihood - self.null_log_likelihood) / self.choice_count)


def report_from_cache(
    cache: ChoiceCache, node_model: InnerModel, edge_model: InnerModel | None = None
) -> LikelihoodReport:
    node_beta = cache.beta_for(node_model)
    edge_beta = node_beta if edge_model is None else cache.beta_for(edge_model)
    ll, zeros = cache.evaluate_beta(node_beta, edge_beta)
    null_beta = np.zeros(len(cache.components))
    null_beta[cache.null_index] = 1.0
    l0, _ = cache.evaluate_beta(null_beta, null_beta)
    return LikelihoodReport(ll, cache.choice_count, l0, zeros)


def trace_log_likelihood(
    trace: GrowthTrace,
    node_model: InnerModel,
    edge_model: InnerModel | None = None,
    mode: str = SIMPLE,
    epsilon: float = 0.0,
    override: bool = False,
    seed_history: bool = False,
) -> LikelihoodReport:
    """Replay ``trace`` and report the exact log-likelihood of its choices.

    New-node and newest-node events use ``node_model``; inner-edge events
    use ``edge_model`` (defaulting to the node model). ``epsilon`` > 0
    mixes each model with the uniform component before evaluation.
    """
    node_model.require_valid(override)
    if edge_model is not None:
        edge_model.require_valid(override)
    node_model = node_model.with_epsilon(epsilon)
    edge_model = None if edge_model is None else edge_model.with_epsilon(epsilon)
    comps = list(dict.fromkeys(node_model.components + (edge_model.components if edge_model else [])))
    cache = build_choice_cache(trace, comps, mode, seed_history)
    return report_from_cache(cache, node_model, edge_model)


def per_choice_ratio(report: LikelihoodReport, rival: LikelihoodReport) -> float:
    """exp((l - l_rival) / t): geometric-mean likelihood ratio per choice."""
    if report.choice_count != rival.choice_count:
        raise MismatchedTracesError(
            f"choice counts differ: {report.choice_count} vs {rival.choice_count}"
        )
    if report.zero_probability_choices or rival.zero_probability_choices:
        raise ZeroProbabilityError("a report contains zero-probability choices")
    return math.exp(
        (report.log_likelihood - rival.log_likelihood) / report.choice_count
    )


# -- single-choice helpers (used directly by tests and small-scale checks) -----


def choice_log_likelihood(
    model: InnerModel,
    chosen: int,
    choice_set,
    graph: EvolvingGraph,
    override: bool = False,
) -> float:
    """ln p(chosen) under the mixture; -inf marks a zero-probability choice."""
    cands = np.fromiter(sorted(choice_set), dtype=np.int64, count=len(choice_set))
    idx = _index_of(cands, chosen)
    p = float(probability_array(model, cands, graph, override)[idx])
    return math.log(p) if p > 0.0 else -math.inf


def edge_log_likelihood(
    start_model: InnerModel,
    end_model: InnerModel,
    edge: tuple[int, int],
    graph: EvolvingGraph,
    mode: str = SIMPLE,
    override: bool = False,
) -> float:
    """ln[p(x|S1) p(y|S2(x)) + p(y|S1) p(x|S2(y))] for inner edge (x, y).

    S1 holds every node with at least one eligible end node; S2(x)
    excludes x and its neighbours. Counts as two choices.
    """
    x, y = edge
    s1 = inner_start_candidates(graph, mode)

    def prob(model, cands, node):
        idx = _index_of(cands, node)
        return float(probability_array(model, cands, graph, override)[idx])

    p = prob(start_model, s1, x) * prob(end_model, attach_candidates(graph, x, mode), y)
    p += prob(start_model, s1, y) * prob(end_model, attach_candidates(graph, y, mode), x)
    return math.log(p) if p > 0.0 else -math.inf


# -- parameter-grid sweep --------------------------------------------------------


@dataclass
class SweepRow:
    params: dict[str, float]
    log_likelihood: float
    choice_count: int
    c0: float


@dataclass
class SweepResult:
    axes: list[str]
    rows: list[SweepRow]

    @property
    def argmax(self) -> SweepRow:
        finite = [r for r in self.rows if math.isfinite(r.c0)]
        if not finite:
            raise ZeroProbabilityError("every grid point had zero-probability choices")
        return max(finite, key=lambda r: r.c0)

    def to_csv(self) -> str:
        lines = [",".join(self.axes + ["log_likelihood", "t", "c0"])]
        for r in self.rows:
            vals = [f"{r.params[a]:g}" for a in self.axes]
            vals += [repr(r.log_likelihood), str(r.choice_count), repr(r.c0)]
            lines.append(",".join(vals))
        return "\n".join(lines) + "\n"


def sweep(
    trace: GrowthTrace,
    node_template: str,
    axes: list[tuple[str, list[float]]],
    edge_template: str | None = None,
    mode: str = SIMPLE,
    epsilon: float = 0.0,
    seed_history: bool = False,
) -> SweepResult:
    """Evaluate a model template over a parameter grid (row-major order).

    Templates follow the mixture grammar with named weights/parameters
    bound from the grid axes; the reserved weight ``rest`` absorbs the
    remaining mass. Every grid point must instantiate a valid model.
    """
    names = [name for name, _ in axes]
    grid = list(itertools.product(*(vals for _, vals in axes)))

    models = []
    all_components: dict[Component, None] = {}
    for point in grid:
        binding = dict(zip(names, point))
        nm = parse_model(node_template, binding).with_epsilon(epsilon)
        em = None if edge_template is None else parse_model(edge_template, binding).with_epsilon(epsilon)
        nm.require_valid()
        if em is not None:
            em.require_valid()
        models.append((binding, nm, em))
        for c in nm.components + (em.components if em else []):
            all_components[c] = None

    cache = build_choice_cache(trace, list(all_components), mode, seed_history)
    rows = []
    for binding, nm, em in models:
        report = report_from_cache(cache, nm, em)
        rows.append(SweepRow(binding, report.log_likelihood, report.choice_count, report.c0))
    return SweepResult(names, rows)
