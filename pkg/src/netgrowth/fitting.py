"""Weighted least-squares fitting of component weights.

Every observed choice contributes one indicator-1 row (the chosen node)
plus sampled or exhaustive indicator-0 rows; each row carries the
per-component probabilities of that candidate at that choice. Component
weights are fitted by identity-link weighted least squares with no
intercept, matching the estimand E[indicator] = sum_k beta_k p_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    AllNonPositiveError,
    EmptyChoiceSetError,
    FitError,
    InsufficientRowsError,
    RankDeficientError,
)
from .likelihood import (
    SIMPLE,
    attach_candidates,
    inner_start_candidates,
    new_node_candidates,
)
from .models import Component, InnerModel, component_prob_matrix
from .trace import EventKind, GrowthTrace, apply_event

EXHAUSTIVE = None

# two-sided normal-approximation thresholds; row counts are in the millions
_SIGNIFICANCE = ((3.291, "0.1%"), (2.576, "1%"), (1.960, "5%"), (1.645, "10%"))


def significance_label(t_stat: float) -> str:
    for threshold, label in _SIGNIFICANCE:
        if abs(t_stat) >= threshold:
            return label
    return "none"


@dataclass(frozen=True)
class DesignRow:
    choice_index: int
    node: int
    indicator: float
    weight: float
    component_probs: np.ndarray


@dataclass
class Design:
    """Column-wise design data; ``probs`` has one column per component."""

    components: list[Component]
    choice_index: np.ndarray
    node: np.ndarray
    indicator: np.ndarray
    weight: np.ndarray
    probs: np.ndarray

    @property
    def row_count(self) -> int:
        return len(self.indicator)

    def rows(self) -> Iterator[DesignRow]:
        for i in range(self.row_count):
            yield DesignRow(
                int(self.choice_index[i]),
                int(self.node[i]),
                float(self.indicator[i]),
                float(self.weight[i]),
                self.probs[i],
            )

    def to_csv(self) -> str:
        header = "j,i,indicator,weight," + ",".join(
            f"p_{k + 1}" for k in range(len(self.components))
        )
        lines = [header]
        for i in range(self.row_count):
            ps = ",".join(repr(p) for p in self.probs[i])
            lines.append(
                f"{self.choice_index[i]},{self.node[i]},"
                f"{self.indicator[i]:g},{repr(float(self.weight[i]))},{ps}"
            )
        return "\n".join(lines) + "\n"


def build_design(
    trace: GrowthTrace,
    components: list[Component],
    negatives: int | None = 10,
    rng=None,
    mode: str = SIMPLE,
    seed_history: bool = False,
) -> Design:
    """Replay a trace and emit design rows for every observed choice.

    ``negatives`` is the number of uniformly-sampled non-chosen candidates
    per choice (``None`` for the exhaustive design). Sampled rows carry
    weight (|s|-1)/m so weighted moments are unbiased for the exhaustive
    design; chosen rows always carry weight 1.

    Inner-edge events decompose into a start-node choice over S1 and an
    end-node choice over S2(start), in the edge's recorded endpoint order.
    """
    if negatives is not None and negatives < 1:
        raise FitError("negatives per choice must be >= 1 (or None for exhaustive)")
    if rng is None or isinstance(rng, int):
        rng = np.random.default_rng(rng)

    graph = trace.seed_graph()
    if seed_history:
        for u, v in trace.seed_edges:
            graph.record_selection(u)
            graph.record_selection(v)

    chunks_j, chunks_node, chunks_ind, chunks_w, chunks_p = [], [], [], [], []
    j = 0

    def emit(cands: np.ndarray, chosen: int) -> None:
        nonlocal j
        m_all = len(cands)
        if m_all == 0:
            raise EmptyChoiceSetError("empty choice set while building the design")
        mat = component_prob_matrix(components, cands, graph)  # (k, m_all)
        chosen_idx = int(np.searchsorted(cands, chosen))
        if negatives is None or negatives >= m_all - 1:
            sel = np.arange(m_all)
            weights = np.ones(m_all)
        else:
            neg = rng.choice(m_all - 1, size=negatives, replace=False)
            neg[neg >= chosen_idx] += 1
            sel = np.concatenate(([chosen_idx], neg))
            weights = np.full(len(sel), (m_all - 1) / negatives)
            weights[0] = 1.0
        ind = np.zeros(len(sel))
        ind[np.flatnonzero(sel == chosen_idx)] = 1.0
        chunks_j.append(np.full(len(sel), j, dtype=np.int64))
        chunks_node.append(cands[sel])
        chunks_ind.append(ind)
        chunks_w.append(weights)
        chunks_p.append(mat[:, sel].T)
        j += 1

    for event in trace.events:
        if event.kind is EventKind.INNER_EDGE:
            x, y = event.source, event.target
            emit(inner_start_candidates(graph, mode), x)
            emit(attach_candidates(graph, x, mode), y)
        elif event.kind is EventKind.NEW_NODE_EDGE:
            emit(new_node_candidates(graph, mode), event.target)
        else:
            emit(attach_candidates(graph, event.source, mode), event.target)
        apply_event(graph, event)

    return Design(
        list(components),
        np.concatenate(chunks_j),
        np.concatenate(chunks_node),
        np.concatenate(chunks_ind),
        np.concatenate(chunks_w),
        np.vstack(chunks_p),
    )


@dataclass
class FitReport:
    components: list[Component]
    estimates: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    significance: list[str]
    residual_variance: float
    row_count: int
    normalized_model: InnerModel
    dropped: list[Component]

    def table(self) -> str:
        width = max(len(c.label()) for c in self.components)
        lines = [f"{'component':<{width}}  estimate    std.err     t        signif"]
        for i, c in enumerate(self.components):
            lines.append(
                f"{c.label():<{width}}  {self.estimates[i]: .5f}   "
                f"{self.std_errors[i]:.5f}   {self.t_stats[i]: 8.2f}  {self.significance[i]}"
            )
        lines.append(f"rows: {self.row_count}  residual variance: {self.residual_variance:.6g}")
        lines.append(f"normalized model: {self.normalized_model.describe()}")
        if self.dropped:
            lines.append("dropped (non-positive): " + ", ".join(c.label() for c in self.dropped))
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["component,estimate,std_error,t,significance"]
        for i, c in enumerate(self.components):
            lines.append(
                f"{c.label()},{repr(float(self.estimates[i]))},"
                f"{repr(float(self.std_errors[i]))},{repr(float(self.t_stats[i]))},"
                f"{self.significance[i]}"
            )
        return "\n".join(lines) + "\n"


_MU_CLIP = 1e-8
_REWEIGHT_STEPS = 2


def fit(design: Design, reweight_steps: int = _REWEIGHT_STEPS) -> FitReport:
    """Identity-link least squares with binomial variance reweighting.

    Starts from the sampling-weighted solve, then iterates with combined
    weights w / (mu (1 - mu)) where mu is the current fitted mean. The
    variance weighting is what makes hub candidates (large, noisy
    indicator probabilities) stop dominating the fit. Standard errors come
    from sigma^2 (X'WX)^-1 with sigma^2 the weighted residual variance;
    significance uses two-sided normal thresholds.
    """
    k = len(design.components)
    if k < 2:
        raise FitError("fitting requires at least two components")
    n = design.row_count
    if n <= k:
        raise InsufficientRowsError(f"{n} rows cannot identify {k} weights")

    X = design.probs
    y = design.indicator
    w0 = design.weight
    w = w0
    beta = None
    for step in range(reweight_steps + 1):
        sw = np.sqrt(w)
        beta, _, rank, _ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
        if rank < k:
            raise RankDeficientError(
                "design matrix is rank deficient (collinear components?)"
            )
        if step < reweight_steps:
            mu = np.clip(X @ beta, _MU_CLIP, 1.0 - _MU_CLIP)
            w = w0 / (mu * (1.0 - mu))
    resid = y - X @ beta
    rss = float(w @ (resid * resid))
    sigma2 = rss / (n - k)
    xtwx = (X * w[:, None]).T @ X
    cov = sigma2 * np.linalg.inv(xtwx)
    se = np.sqrt(np.diag(cov))
    t_stats = np.where(se > 0, beta / se, np.inf)
    labels = [significance_label(t) for t in t_stats]
    model, dropped = normalize_to_model(beta, design.components)
    return FitReport(
        list(design.components), beta, se, t_stats, labels, sigma2, n, model, dropped
    )


def normalize_to_model(
    estimates, components: list[Component]
) -> tuple[InnerModel, list[Component]]:
    """Clip non-positive estimates to zero and rescale the rest to sum 1.

    Raw least-squares estimates are unconstrained; this post-processing
    recovers a valid mixture for likelihood evaluation. Returns the model
    and the dropped components.
    """
    estimates = np.asarray(estimates, dtype=float)
    keep = estimates > 0.0
    if not keep.any():
        raise AllNonPositiveError("no positive component estimates")
    total = estimates[keep].sum()
    terms = [
        (float(e / total), c)
        for e, c, kept in zip(estimates, components, keep)
        if kept
    ]
    dropped = [c for c, kept in zip(components, keep) if not kept]
    return InnerModel(terms), dropped
