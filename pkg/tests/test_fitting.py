"""Design construction and weighted least-squares fitting tests."""

import math

import numpy as np
import pytest

from netgrowth.errors import (
    AllNonPositiveError,
    FitError,
    InsufficientRowsError,
    RankDeficientError,
)
from netgrowth.fitting import (
    Design,
    build_design,
    fit,
    normalize_to_model,
    significance_label,
)
from netgrowth.generate import grow_preset
from netgrowth.models import Component, parse_components
from netgrowth.trace import EventKind, parse_trace


@pytest.fixture(scope="module")
def toy_trace():
    return grow_preset("paper-theta1", 60, np.random.default_rng(2))


@pytest.fixture(scope="module")
def components():
    return parse_components("pfp(0.05),triangle")


def normal_equations_oracle(design: Design, reweight_steps: int = 2) -> np.ndarray:
    """Independent solver: explicit X'WX beta = X'Wy with the same
    binomial-variance reweighting schedule as the production fitter."""
    X = design.probs
    y = design.indicator
    w = design.weight.copy()
    beta = None
    for step in range(reweight_steps + 1):
        xtwx = X.T @ (X * w[:, None])
        xtwy = X.T @ (w * y)
        beta = np.linalg.solve(xtwx, xtwy)
        if step < reweight_steps:
            mu = np.clip(X @ beta, 1e-8, 1.0 - 1e-8)
            w = design.weight / (mu * (1.0 - mu))
    return beta


# -- design construction ----------------------------------------------------------


def test_exhaustive_design_shape(toy_trace, components):
    design = build_design(toy_trace, components, negatives=None)
    # attach-3 trace: every event is a single-node choice over all
    # current candidates; each choice has exactly one indicator-1 row
    choices = len(toy_trace.events)
    assert len(np.unique(design.choice_index)) == choices
    assert design.indicator.sum() == choices
    assert (design.weight == 1.0).all()
    assert design.probs.shape[1] == 2


def test_sampled_design_weights_recover_choice_set_size(toy_trace, components):
    negatives = 5
    design = build_design(toy_trace, components, negatives=negatives, rng=0)
    for j in np.unique(design.choice_index):
        rows = design.choice_index == j
        m_all = design.weight[rows].sum()  # 1 + negatives * (m-1)/negatives
        assert m_all == pytest.approx(round(m_all))
        assert int(design.indicator[rows].sum()) == 1
        # no candidate sampled twice within one choice
        nodes = design.node[rows]
        assert len(set(nodes)) == len(nodes)


def test_sampled_moments_unbiased(toy_trace, components):
    exhaustive = build_design(toy_trace, components, negatives=None)
    full = (exhaustive.probs * exhaustive.weight[:, None]).sum(axis=0)
    samples = []
    for seed in range(40):
        d = build_design(toy_trace, components, negatives=8, rng=seed)
        samples.append((d.probs * d.weight[:, None]).sum(axis=0))
    mean = np.mean(samples, axis=0)
    assert np.allclose(mean, full, rtol=0.05)


def test_inner_edges_become_two_choices():
    text = "SEED\na b\nb c\nc a\nEVENTS\nd a\ne b\nd b\n"
    trace = parse_trace(text)
    assert trace.event_kinds()[-1] is EventKind.INNER_EDGE
    design = build_design(trace, parse_components("degree,null"), negatives=None)
    assert len(np.unique(design.choice_index)) == 4


def test_design_csv(toy_trace, components):
    design = build_design(toy_trace, components, negatives=3, rng=1)
    lines = design.to_csv().strip().splitlines()
    assert lines[0] == "j,i,indicator,weight,p_1,p_2"
    assert len(lines) == design.row_count + 1


def test_design_deterministic_given_rng(toy_trace, components):
    a = build_design(toy_trace, components, negatives=4, rng=9)
    b = build_design(toy_trace, components, negatives=4, rng=9)
    assert np.array_equal(a.node, b.node)
    assert np.array_equal(a.probs, b.probs)


def test_negatives_validation(toy_trace, components):
    with pytest.raises(FitError):
        build_design(toy_trace, components, negatives=0)


# -- fitting -----------------------------------------------------------------------


def test_fit_matches_normal_equations_oracle(toy_trace):
    # the attach-1-or-2 trace keeps degree-1 nodes around, so all four
    # component columns carry signal
    theta2_toy = grow_preset("paper-theta2", 80, np.random.default_rng(3))
    cases = [
        (toy_trace, "pfp(0.05),triangle"),
        (theta2_toy, "null,triangle,singleton,doubleton"),
    ]
    for trace, comps in cases:
        design = build_design(trace, parse_components(comps), negatives=None)
        report = fit(design)
        oracle = normal_equations_oracle(design)
        assert np.allclose(report.estimates, oracle, atol=1e-8)


def test_fit_exact_recovery_on_synthetic_design():
    # when indicators equal the mixture probabilities exactly, the solve is
    # exact and the residual variance vanishes
    rng = np.random.default_rng(0)
    p1 = rng.dirichlet(np.ones(6), size=40).reshape(-1)
    p2 = rng.dirichlet(np.ones(6), size=40).reshape(-1)
    probs = np.column_stack([p1, p2])
    y = 0.3 * p1 + 0.7 * p2
    design = Design(
        parse_components("degree,null"),
        choice_index=np.repeat(np.arange(40), 6),
        node=np.tile(np.arange(6), 40),
        indicator=y,
        weight=np.ones(240),
        probs=probs,
    )
    report = fit(design)
    assert report.estimates == pytest.approx([0.3, 0.7], abs=1e-9)
    assert report.residual_variance == pytest.approx(0.0, abs=1e-12)
    assert report.normalized_model.weights == pytest.approx([0.3, 0.7], abs=1e-9)


def test_fit_recovers_true_weights_roughly():
    trace = grow_preset("paper-theta1", 3000, np.random.default_rng(5))
    design = build_design(trace, parse_components("pfp(0.05),triangle"), negatives=None)
    report = fit(design)
    assert report.estimates[0] == pytest.approx(0.5, abs=0.1)
    assert report.estimates[1] == pytest.approx(0.5, abs=0.1)
    assert sum(report.estimates) == pytest.approx(1.0, abs=0.05)


def test_rank_deficient_design_raises(toy_trace):
    # pfp with exponent offset 0 is the degree component in disguise
    design = build_design(toy_trace, parse_components("degree,pfp(0)"), negatives=None)
    with pytest.raises(RankDeficientError):
        fit(design)


def test_fit_requires_two_components(toy_trace):
    design = build_design(toy_trace, parse_components("degree"), negatives=None)
    with pytest.raises(FitError):
        fit(design)


def test_fit_requires_enough_rows():
    design = Design(
        parse_components("degree,null"),
        choice_index=np.zeros(2, dtype=np.int64),
        node=np.arange(2),
        indicator=np.array([1.0, 0.0]),
        weight=np.ones(2),
        probs=np.array([[0.6, 0.5], [0.4, 0.5]]),
    )
    with pytest.raises(InsufficientRowsError):
        fit(design)


def test_report_table_and_csv(toy_trace, components):
    design = build_design(toy_trace, components, negatives=None)
    report = fit(design)
    table = report.table()
    assert "pfp(0.05)" in table and "triangle" in table
    csv = report.to_csv()
    assert csv.splitlines()[0] == "component,estimate,std_error,t,significance"
    assert len(csv.strip().splitlines()) == 3


# -- post-processing ----------------------------------------------------------------


def test_normalize_drops_negative_estimates():
    comps = parse_components("null,triangle,singleton,doubleton,degree")
    # estimate pattern mirroring a spurious negative degree coefficient
    model, dropped = normalize_to_model([0.33, 0.29, 0.24, 0.23, -0.089], comps)
    assert dropped == [Component("degree")]
    total = 0.33 + 0.29 + 0.24 + 0.23
    assert model.weights == pytest.approx([0.33 / total, 0.29 / total, 0.24 / total, 0.23 / total])
    assert model.validate().valid


def test_normalize_all_non_positive_raises():
    with pytest.raises(AllNonPositiveError):
        normalize_to_model([-0.1, 0.0], parse_components("degree,null"))


def test_significance_labels():
    assert significance_label(0.5) == "none"
    assert significance_label(1.7) == "10%"
    assert significance_label(-2.0) == "5%"
    assert significance_label(2.6) == "1%"
    assert significance_label(4.0) == "0.1%"
    assert significance_label(math.inf) == "0.1%"
