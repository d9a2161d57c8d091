import logging

import numpy as np
import pytest

from moeval.domain import LegacyConfig, MetricVector, ModelRecord, WeightConfig
from moeval.scoring import (
    REFERENCE_FITTED_SLOPE,
    REFERENCE_IMPORTANCE_RATIO,
    REFERENCE_LEGACY_SLOPE,
    ScoringException,
    delta,
    dense_ranks,
    implied_importance_ratio,
    implied_legacy_slope,
    is_thresholded,
    normalize_legacy,
    rank_legacy,
    rank_models,
    rank_stage_one,
    score_legacy,
    score_proposed,
    score_stage_one,
    sort_by_legacy,
)
from moeval.synth import PopulationSpec, generate_population
from moeval.tradeoff import fit_tradeoff, fit_tradeoffs, known_tradeoff, pairs_for


@pytest.fixture
def legacy() -> LegacyConfig:
    return LegacyConfig(
        base_id="hit_rate",
        category_weights={"hit_rate": 0.5, "mred_activity": 0.5},
        baseline_ref=MetricVector(hit_rate=0.0, mred_activity=0.0),
        best_ref=MetricVector(hit_rate=1.0, mred_activity=1.0),
        base_threshold=0.1,
    )


def record(model_id: str, hit_rate: float, mred: float) -> ModelRecord:
    return ModelRecord.from_folds(
        model_id, [MetricVector(hit_rate=hit_rate, mred_activity=mred)]
    )


def test_normalize_legacy_midpoint():
    assert normalize_legacy(0.5, 0.2, 0.8) == pytest.approx(0.5)


@pytest.mark.parametrize("m_base, m_best", [(0.2, 0.8), (-0.4, -0.1), (3.0, 1.0)])
def test_normalize_legacy_references(m_base, m_best):
    assert normalize_legacy(m_base, m_base, m_best) == 0.0
    assert normalize_legacy(m_best, m_base, m_best) == 1.0


def test_normalize_legacy_is_not_clipped():
    assert normalize_legacy(1.1, 0.2, 0.8) > 1.0
    assert normalize_legacy(0.0, 0.2, 0.8) < 0.0


def test_normalize_legacy_degenerate():
    with pytest.raises(ScoringException, match="Degenerate"):
        normalize_legacy(0.5, 0.3, 0.3)


def test_score_legacy(legacy):
    assert score_legacy({"hit_rate": 0.5, "mred_activity": 0.25}, legacy) == 0.375


def test_score_legacy_thresholded(legacy):
    v = {"hit_rate": 0.05, "mred_activity": 0.9}
    assert is_thresholded(v, legacy)
    assert score_legacy(v, legacy) == 0.0
    assert not is_thresholded({"hit_rate": 0.1, "mred_activity": 0.9}, legacy)


def test_score_legacy_missing_metric(legacy):
    with pytest.raises(ScoringException, match="mred_activity"):
        score_legacy({"hit_rate": 0.5}, legacy)


def test_score_stage_one():
    assert score_stage_one({"a": 0.25, "b": 0.75}, ["a", "b"]) == 0.5
    with pytest.raises(ScoringException):
        score_stage_one({"a": 0.25}, [])


def test_delta_and_proposed_score():
    curve = known_tradeoff("hit_rate", "mred_activity", -2.0, 1.0)
    assert delta(0.6, 0.1, curve, 0.5) == pytest.approx(-0.1)
    deltas, s_p = score_proposed(
        {"hit_rate": 0.6, "mred_activity": 0.1},
        {"mred_activity": curve},
        WeightConfig("hit_rate", {"mred_activity": 0.5}),
    )
    assert deltas == {"mred_activity": s_p}
    assert s_p == pytest.approx(-0.1)


@pytest.mark.parametrize("w", [0.0, 1.0])
def test_delta_weight_bounds(w):
    with pytest.raises(ScoringException):
        delta(0.5, 0.5, known_tradeoff("hr", "mred", -1.0, 1.0), w)


def test_score_proposed_curve_and_weight_coverage():
    curve = known_tradeoff("hit_rate", "mred_activity", -2.0, 1.0)
    v = {"hit_rate": 0.6, "mred_activity": 0.1, "div": 0.2}
    with pytest.raises(ScoringException, match="No trade-off curve for auxiliary"):
        score_proposed(v, {}, WeightConfig("hit_rate", {"mred_activity": 0.5}))
    with pytest.raises(ScoringException, match="No importance weight"):
        score_proposed(v, {"mred_activity": curve}, WeightConfig("hit_rate", {}))
    with pytest.raises(ScoringException, match="does not match"):
        score_proposed(
            v,
            {"div": curve},
            WeightConfig("hit_rate", {"div": 0.5}),
        )


def test_score_is_independent_of_aux_order():
    curves = {
        "a": known_tradeoff("hr", "a", -1.0, 0.9),
        "b": known_tradeoff("hr", "b", -3.0, 0.7),
        "c": known_tradeoff("hr", "c", -0.5, 0.4),
    }
    v = {"hr": 0.31, "a": 0.1, "b": 0.07, "c": 0.2}
    forward = WeightConfig("hr", {"a": 0.3, "b": 0.4, "c": 0.55})
    backward = WeightConfig("hr", {"c": 0.55, "b": 0.4, "a": 0.3})
    assert score_proposed(v, curves, forward) == score_proposed(v, curves, backward)


def test_proposed_score_rises_with_base_and_aux_metrics():
    rng = np.random.default_rng(21)
    weights = WeightConfig("hr", {"a": 0.3, "b": 0.7})
    for _ in range(200):
        curves = {
            aux_id: known_tradeoff(
                "hr", aux_id, -rng.uniform(0.1, 5.0), rng.uniform(0.0, 1.0)
            )
            for aux_id in ("a", "b")
        }
        v = dict(zip(("hr", "a", "b"), rng.uniform(-1.0, 1.0, size=3).tolist()))
        s_p = score_proposed(v, curves, weights).s_p
        step = float(rng.uniform(1e-3, 0.5))
        for metric_id in v:
            better = v | {metric_id: v[metric_id] + step}
            assert score_proposed(better, curves, weights).s_p > s_p


def test_on_front_models_tie_at_equal_importance():
    records = generate_population(
        PopulationSpec(-1.5, 0.6, n_models=30, aux_range=(0.0, 0.3), noise_scale=0.02)
    )
    curves = fit_tradeoffs(records, "hit_rate", ["mred_activity"])
    weights = WeightConfig("hit_rate", {"mred_activity": 0.5})
    reports = rank_models(records, curves, weights)

    aggregates = {r.model_id: r.aggregate for r in records}

    def on_front(model_id: str) -> bool:
        v = aggregates[model_id]
        return abs(v["hit_rate"] - (0.6 - 1.5 * v["mred_activity"])) < 1e-12

    front_scores = [r.s_p for r in reports if on_front(r.model_id)]
    assert len(front_scores) >= 6
    assert max(front_scores) - min(front_scores) < 1e-9
    assert all(r.s_p <= max(front_scores) + 1e-9 for r in reports)


def test_legacy_scheme_breaks_ties_between_pareto_optimal_models(legacy):
    # both models sit on the front base = -2 aux + 1
    a = record("a", 0.8, 0.1)
    b = record("b", 0.4, 0.3)
    assert score_legacy(a.aggregate, legacy) != score_legacy(b.aggregate, legacy)

    curve = fit_tradeoff(
        pairs_for([a, b], "hit_rate", "mred_activity"),
        base_id="hit_rate",
        aux_id="mred_activity",
    )
    weights = WeightConfig("hit_rate", {"mred_activity": 0.5})
    s_a = score_proposed(a.aggregate, {"mred_activity": curve}, weights).s_p
    s_b = score_proposed(b.aggregate, {"mred_activity": curve}, weights).s_p
    assert s_a == pytest.approx(s_b, abs=1e-9)


@pytest.mark.parametrize("p", [0.1, 3.0, 10.0])
@pytest.mark.parametrize("q", [-1.0, 0.0, 2.0])
def test_scores_invariant_to_affine_aux_rescaling(p, q):
    records = generate_population(
        PopulationSpec(
            -2.0, 1.0, n_models=40, aux_range=(0.05, 0.4), noise_scale=0.05, seed=3
        )
    )
    rescaled = [
        record(
            r.model_id, r.aggregate["hit_rate"], p * r.aggregate["mred_activity"] + q
        )
        for r in records
    ]
    weights = WeightConfig("hit_rate", {"mred_activity": 0.3})

    def scores(population):
        curves = fit_tradeoffs(population, "hit_rate", ["mred_activity"])
        reports = rank_models(population, curves, weights)
        return {r.model_id: (r.s_p, r.rank_p) for r in reports}

    original = scores(records)
    transformed = scores(rescaled)
    for model_id, (s_p, rank_p) in original.items():
        assert transformed[model_id][0] == pytest.approx(s_p, abs=1e-9)
        assert transformed[model_id][1] == rank_p


def test_dense_ranks():
    assert dense_ranks([0.3, 0.1, 0.3, 0.2]) == [1, 3, 1, 2]
    assert dense_ranks([]) == []


def test_rank_models_with_legacy(legacy, caplog):
    records = [
        record("low", 0.05, 0.45),
        record("mid", 0.4, 0.3),
        record("top", 0.8, 0.1),
        record("twin", 0.8, 0.1),
    ]
    curves = {"mred_activity": known_tradeoff("hit_rate", "mred_activity", -2.0, 1.0)}
    weights = WeightConfig("hit_rate", {"mred_activity": 0.3})
    with caplog.at_level(logging.INFO, logger="moeval"):
        reports = rank_models(records, curves, weights, legacy)

    assert [r.model_id for r in reports] == ["top", "twin", "mid", "low"]
    assert [r.rank_p for r in reports] == [1, 1, 2, 3]
    by_id = {r.model_id: r for r in reports}
    assert by_id["low"].thresholded
    assert by_id["low"].s_o == 0.0
    assert by_id["low"].rank_o == 3
    assert by_id["top"].rank_o == by_id["twin"].rank_o == 1
    assert "1 of 4 models fall below the legacy threshold" in caplog.text
    legacy_order = [r.model_id for r in sort_by_legacy(reports)]
    assert legacy_order == ["top", "twin", "mid", "low"]


def test_rank_models_flags_extrapolation():
    curve = fit_tradeoff([(0.8, 0.1), (0.4, 0.3)], base_id="hit_rate", aux_id="mred")
    reports = rank_models(
        [
            ModelRecord.from_folds("in", [MetricVector(hit_rate=0.5, mred=0.2)]),
            ModelRecord.from_folds("out", [MetricVector(hit_rate=0.1, mred=0.5)]),
        ],
        {"mred": curve},
        WeightConfig("hit_rate", {"mred": 0.5}),
    )
    by_id = {r.model_id: r for r in reports}
    assert by_id["in"].extrapolated == ()
    assert by_id["out"].extrapolated == ("mred",)


def test_rank_models_errors():
    weights = WeightConfig("hit_rate", {"mred_activity": 0.5})
    with pytest.raises(ScoringException, match="No model records"):
        rank_models([], {}, weights)
    partial = ModelRecord.from_folds("p", [MetricVector(hit_rate=0.5)])
    with pytest.raises(ScoringException, match="missing metrics"):
        rank_models([partial], {}, weights)


def test_sort_by_legacy_needs_legacy_ranks():
    curves = {"mred_activity": known_tradeoff("hit_rate", "mred_activity", -2.0, 1.0)}
    reports = rank_models(
        [record("a", 0.5, 0.2)],
        curves,
        WeightConfig("hit_rate", {"mred_activity": 0.5}),
    )
    with pytest.raises(ScoringException, match="Legacy ranks are missing"):
        sort_by_legacy(reports)


def test_rank_legacy_and_stage_one(legacy):
    records = [record("a", 0.5, 0.25), record("b", 0.2, 0.8), record("c", 0.05, 0.9)]
    rows = rank_legacy(records, legacy)
    assert [(r.model_id, r.rank, r.thresholded) for r in rows] == [
        ("b", 1, False),
        ("a", 2, False),
        ("c", 3, True),
    ]
    stage_one = rank_stage_one(records, ["hit_rate", "mred_activity"])
    assert [r.model_id for r in stage_one] == ["b", "c", "a"]
    assert stage_one[0].score == 0.5


def test_implied_legacy_slope():
    assert implied_legacy_slope(0.5, 0.25, 0.5, 0.25) == 1.0
    with pytest.raises(ScoringException):
        implied_legacy_slope(0.5, 0.25, 0.3, 0.3)


def test_implied_importance_ratio_reference_values():
    assert implied_importance_ratio(44.399, -7.944, 1.0) == pytest.approx(
        5.589, abs=5e-4
    )
    assert implied_importance_ratio(
        REFERENCE_LEGACY_SLOPE, REFERENCE_FITTED_SLOPE, 2.505
    ) == pytest.approx(REFERENCE_IMPORTANCE_RATIO, abs=5e-2)


@pytest.mark.parametrize(
    "c1_fitted, k_ratio, match",
    [(0.0, 1.0, "zero fitted slope"), (-1.0, 0.0, "positive")],
)
def test_implied_importance_ratio_errors(c1_fitted, k_ratio, match):
    with pytest.raises(ScoringException, match=match):
        implied_importance_ratio(2.0, c1_fitted, k_ratio)


def test_equal_implied_and_fitted_slopes_mean_equal_importance():
    # the legacy slope (1 - 0) / (0.5 - 0) = 2 matches a fitted slope of -2
    c1_legacy = implied_legacy_slope(1.0, 0.0, 0.5, 0.0)
    ratio = implied_importance_ratio(c1_legacy, -2.0, 1.0)
    assert ratio == 1.0
    assert ratio / (1 + ratio) == 0.5
    assert np.isclose(c1_legacy, 2.0)
