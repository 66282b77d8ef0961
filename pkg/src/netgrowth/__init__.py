"""Likelihood-based analysis and simulation of growing-network attachment models."""

from .graph import EvolvingGraph, triangle_graph
from .models import Component, InnerModel, parse_components, parse_model, probability_vector
from .trace import EventKind, GrowthTrace, OuterEvent, parse_trace, read_trace, write_trace
from .likelihood import (
    LikelihoodReport,
    choice_log_likelihood,
    edge_log_likelihood,
    per_choice_ratio,
    sweep,
    trace_log_likelihood,
)
from .fitting import build_design, fit, normalize_to_model
from .generate import FixedAttach, Mixed, RandomAttach, Replay, grow, grow_preset, weighted_sample
from .stats import snapshot, trajectory

__version__ = "0.1.0"

__all__ = [
    "EvolvingGraph",
    "triangle_graph",
    "Component",
    "InnerModel",
    "parse_components",
    "parse_model",
    "probability_vector",
    "EventKind",
    "GrowthTrace",
    "OuterEvent",
    "parse_trace",
    "read_trace",
    "write_trace",
    "LikelihoodReport",
    "choice_log_likelihood",
    "edge_log_likelihood",
    "per_choice_ratio",
    "sweep",
    "trace_log_likelihood",
    "build_design",
    "fit",
    "normalize_to_model",
    "FixedAttach",
    "Mixed",
    "RandomAttach",
    "Replay",
    "grow",
    "grow_preset",
    "weighted_sample",
    "snapshot",
    "trajectory",
]
