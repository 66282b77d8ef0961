"""Attachment-model components and their weighted mixtures.

A component assigns an unnormalised affinity to every node; a mixture is a
weighted sum of per-component distributions, each normalised over the
current candidate set. The CLI grammar for mixtures is
``weight*component`` terms joined by commas, e.g.
``0.5*pfp(0.05),0.5*triangle``.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateComponentError,
    EmptyChoiceSetError,
    InvalidModelError,
    ModelSpecError,
)
from .graph import EvolvingGraph

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-9

KINDS = ("null", "degree", "triangle", "singleton", "doubleton", "recent", "pfp")
_LN10 = math.log(10.0)


@dataclass(frozen=True)
class Component:
    """One model component: uniform, degree, triangle-count, degree==1,
    degree==2, recently-selected (window ``param``) or positive-feedback
    preference (exponent offset ``param``)."""

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelSpecError(f"unknown component kind {self.kind!r}")
        if self.kind == "recent":
            if self.param is None or int(self.param) < 1 or self.param != int(self.param):
                raise ModelSpecError("recent window must be an integer >= 1")
        elif self.kind == "pfp":
            if self.param is None or not math.isfinite(self.param):
                raise ModelSpecError("pfp exponent parameter must be a finite real")
        elif self.param is not None:
            raise ModelSpecError(f"component {self.kind!r} takes no parameter")

    def label(self) -> str:
        if self.kind == "recent":
            return f"recent({int(self.param)})"
        if self.kind == "pfp":
            return f"pfp({self.param:g})"
        return self.kind

    def raw_vector(self, candidates: np.ndarray, graph: EvolvingGraph) -> np.ndarray:
        """Unnormalised affinities for the given candidate node ids."""
        if self.kind == "null":
            return np.ones(len(candidates))
        if self.kind == "degree":
            return graph.degrees[candidates]
        if self.kind == "triangle":
            return graph.triangles[candidates]
        if self.kind == "singleton":
            return graph.degrees[candidates] == 1
        if self.kind == "doubleton":
            return graph.degrees[candidates] == 2
        if self.kind == "recent":
            recent = graph.recent_set(int(self.param))
            if not recent:
                return np.zeros(len(candidates))
            mask = np.zeros(graph.node_count, dtype=bool)
            mask[list(recent)] = True
            return mask[candidates]
        # pfp: d ** (1 + param * log10(d)); zero-degree nodes get weight 0
        d = graph.degrees[candidates]
        if d.size and d.min() > 0:
            ld = np.log(d)
            return np.exp(ld + (self.param / _LN10) * ld * ld)
        out = np.zeros(len(candidates))
        pos = d > 0
        ld = np.log(d[pos])
        out[pos] = np.exp(ld + (self.param / _LN10) * ld * ld)
        return out

    def raw_all(self, graph: EvolvingGraph) -> np.ndarray:
        """Affinities for every node, without copying the stat arrays."""
        if self.kind == "null":
            return np.ones(graph.node_count)
        if self.kind == "degree":
            return graph.degrees
        if self.kind == "triangle":
            return graph.triangles
        if self.kind == "singleton":
            return graph.degrees == 1
        if self.kind == "doubleton":
            return graph.degrees == 2
        if self.kind == "recent":
            mask = np.zeros(graph.node_count, dtype=bool)
            recent = graph.recent_set(int(self.param))
            if recent:
                mask[list(recent)] = True
            return mask
        d = graph.degrees
        if d.size and d.min() > 0:
            ld = np.log(d)
            return np.exp(ld + (self.param / _LN10) * ld * ld)
        out = np.zeros(len(d))
        pos = d > 0
        ld = np.log(d[pos])
        out[pos] = np.exp(ld + (self.param / _LN10) * ld * ld)
        return out

    def raw_weight(self, i: int, graph: EvolvingGraph) -> float:
        """Scalar affinity for one node."""
        return float(self.raw_vector(np.asarray([i]), graph)[0])


@dataclass
class ValidityReport:
    valid: bool
    weight_sum: float
    out_of_range: list[float] = field(default_factory=list)
    duplicates: list[str] = field(default_factory=list)

    def message(self) -> str:
        if self.valid:
            return "valid"
        parts = []
        if abs(self.weight_sum - 1.0) > WEIGHT_SUM_TOL:
            parts.append(f"weights sum to {self.weight_sum:g}, expected 1")
        if self.out_of_range:
            parts.append(f"weights outside (0,1): {self.out_of_range}")
        if self.duplicates:
            parts.append(f"duplicate components: {self.duplicates}")
        return "; ".join(parts)


@dataclass
class InnerModel:
    """Weighted mixture of components."""

    terms: list[tuple[float, Component]]

    @property
    def components(self) -> list[Component]:
        return [c for _, c in self.terms]

    @property
    def weights(self) -> list[float]:
        return [w for w, _ in self.terms]

    def validate(self) -> ValidityReport:
        total = sum(self.weights)
        # weight exactly 1 is allowed so single-component models are valid
        out = [w for w in self.weights if not 0.0 < w <= 1.0]
        seen, dups = set(), []
        for c in self.components:
            if c in seen:
                dups.append(c.label())
            seen.add(c)
        valid = abs(total - 1.0) <= WEIGHT_SUM_TOL and not out and not dups
        return ValidityReport(valid, total, out, dups)

    def require_valid(self, override: bool = False) -> None:
        report = self.validate()
        if report.duplicates:
            raise DuplicateComponentError(report.message())
        if not report.valid and not override:
            raise InvalidModelError(report.message())

    def describe(self) -> str:
        return ",".join(f"{w:g}*{c.label()}" for w, c in self.terms)

    def with_epsilon(self, epsilon: float) -> "InnerModel":
        """Mix with the uniform component: (1-e)*self + e*null."""
        if epsilon <= 0.0:
            return self
        terms = [(w * (1.0 - epsilon), c) for w, c in self.terms]
        null = Component("null")
        for idx, (w, c) in enumerate(terms):
            if c == null:
                terms[idx] = (w + epsilon, c)
                break
        else:
            terms.append((epsilon, null))
        return InnerModel(terms)


NULL_MODEL = InnerModel([(1.0, Component("null"))])


def component_prob_matrix(
    components: list[Component], candidates: np.ndarray, graph: EvolvingGraph
) -> np.ndarray:
    """Per-component distributions over the candidate set, shape (k, m).

    Each row is the component's affinities normalised to sum 1; a component
    with zero total affinity falls back to the uniform distribution so the
    mixture stays a probability distribution.
    """
    m = len(candidates)
    if m == 0:
        raise EmptyChoiceSetError("candidate set is empty")
    out = np.empty((len(components), m))
    for k, comp in enumerate(components):
        raw = comp.raw_vector(candidates, graph)
        total = raw.sum()
        if total <= 0.0:
            logger.debug("component %s has zero support; using uniform fallback", comp.label())
            out[k, :] = 1.0 / m
        else:
            out[k, :] = raw / total
    return out


def probability_array(
    model: InnerModel, candidates: np.ndarray, graph: EvolvingGraph, override: bool = False
) -> np.ndarray:
    """Mixture probabilities aligned with ``candidates``."""
    model.require_valid(override)
    mat = component_prob_matrix(model.components, candidates, graph)
    return np.asarray(model.weights) @ mat


def probability_vector(
    model: InnerModel, candidates, graph: EvolvingGraph, override: bool = False
) -> dict[int, float]:
    """Mixture probabilities as a node-id -> probability map."""
    cand = np.fromiter(sorted(candidates), dtype=np.int64, count=len(candidates))
    probs = probability_array(model, cand, graph, override)
    return {int(i): float(p) for i, p in zip(cand, probs)}


# -- model-spec grammar -------------------------------------------------------

_TERM_RE = re.compile(
    r"""^\s*
        (?:(?P<weight>[^*\s]+)\s*\*\s*)?        # optional 'weight*'
        (?P<kind>[a-zA-Z_][a-zA-Z_0-9]*)        # component name
        (?:\(\s*(?P<arg>[^)]*?)\s*\))?          # optional '(arg)'
        \s*$""",
    re.VERBOSE,
)


def _parse_value(token: str, params: dict[str, float] | None, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        pass
    if params is not None and token in params:
        return float(params[token])
    raise ModelSpecError(f"cannot resolve {what} {token!r}")


def parse_component(text: str, params: dict[str, float] | None = None) -> Component:
    m = _TERM_RE.match(text)
    if m is None or m.group("weight") is not None:
        raise ModelSpecError(f"malformed component {text!r}")
    kind = m.group("kind").lower()
    arg = m.group("arg")
    if arg is None:
        return Component(kind)
    return Component(kind, _parse_value(arg, params, "component parameter"))


def parse_model(text: str, params: dict[str, float] | None = None) -> InnerModel:
    """Parse a mixture spec such as ``0.5*pfp(0.05),0.5*triangle``.

    ``params`` supplies values for named weights/parameters (used by grid
    sweeps). The reserved weight name ``rest`` means one minus the sum of
    the other weights and may appear at most once.
    """
    if not text.strip():
        raise ModelSpecError("empty model spec")
    pending_rest = None
    terms: list[tuple[float, Component] | None] = []
    total = 0.0
    for piece in text.split(","):
        m = _TERM_RE.match(piece)
        if m is None:
            raise ModelSpecError(f"malformed term {piece!r}")
        kind = m.group("kind").lower()
        arg = m.group("arg")
        comp = Component(kind, None if arg is None else _parse_value(arg, params, "component parameter"))
        wtok = m.group("weight")
        if wtok is None:
            weight = 1.0  # bare component; only sensible alone or in component lists
        elif wtok == "rest":
            if pending_rest is not None:
                raise ModelSpecError("weight 'rest' may appear at most once")
            pending_rest = len(terms)
            terms.append(None)
            # placeholder; filled in below
            pending_comp = comp
            continue
        else:
            weight = _parse_value(wtok, params, "weight")
        total += weight
        terms.append((weight, comp))
    if pending_rest is not None:
        terms[pending_rest] = (1.0 - total, pending_comp)
    return InnerModel(terms)


def parse_components(text: str, params: dict[str, float] | None = None) -> list[Component]:
    """Parse a weightless component list such as ``pfp(0.05),triangle``."""
    comps = [parse_component(piece, params) for piece in text.split(",")]
    seen = set()
    for c in comps:
        if c in seen:
            raise DuplicateComponentError(f"duplicate component {c.label()}")
        seen.add(c)
    return comps


def template_names(text: str) -> set[str]:
    """Free parameter names appearing in a model template."""
    names = set()
    for piece in text.split(","):
        m = _TERM_RE.match(piece)
        if m is None:
            raise ModelSpecError(f"malformed term {piece!r}")
        for tok in (m.group("weight"), m.group("arg")):
            if tok is None or tok == "rest":
                continue
            try:
                float(tok)
            except ValueError:
                names.add(tok)
    return names
