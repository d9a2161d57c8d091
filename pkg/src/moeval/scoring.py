"""
Proposed trade-off aware score, the legacy normalized weighted mean, leaderboard
ranking, and the analytic comparison between the two.
"""

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
from scipy.stats import rankdata

from .domain import (
    LegacyConfig,
    MetricVector,
    ModelRecord,
    MOEvalException,
    WeightConfig,
)
from .log import logger
from .tradeoff import TradeoffCurve, ev

# Published reference values for the <hit rate, activity-sliced MRED> pair of the
# 2022 challenge leaderboard. The submissions behind them are not shipped.
REFERENCE_LEGACY_SLOPE = 44.399
REFERENCE_FITTED_SLOPE = -7.944
REFERENCE_IMPORTANCE_RATIO = 14.0


class ScoringException(MOEvalException):
    pass


@dataclass(frozen=True)
class ScoreReport:
    model_id: str
    deltas: dict[str, float]
    s_p: float
    rank_p: int
    s_o: float | None = None
    rank_o: int | None = None
    thresholded: bool = False
    extrapolated: tuple[str, ...] = field(default_factory=tuple)


class ProposedScore(NamedTuple):
    deltas: dict[str, float]
    s_p: float


def normalize_legacy(m: float, m_base: float, m_best: float) -> float:
    """
    Position of m between the baseline (0) and the best reference (1), unclipped.

    >>> normalize_legacy(0.2, 0.2, 0.8)
    0.0
    """
    if m_best == m_base:
        raise ScoringException(
            f"Degenerate legacy normalization: best and baseline are both {m_base}"
        )
    return (m - m_base) / (m_best - m_base)


def is_thresholded(v: Mapping[str, float], cfg: LegacyConfig) -> bool:
    return MetricVector(v).require(cfg.base_id) < cfg.base_threshold


def score_legacy(v: Mapping[str, float], cfg: LegacyConfig) -> float:
    vector = MetricVector(v)
    for metric_id in cfg.category_weights:
        if metric_id not in vector:
            raise ScoringException(f"Legacy score needs missing metric '{metric_id}'")
    if is_thresholded(vector, cfg):
        return 0.0
    return math.fsum(
        k
        * normalize_legacy(
            vector[metric_id],
            cfg.baseline_ref.require(metric_id),
            cfg.best_ref.require(metric_id),
        )
        for metric_id, k in cfg.category_weights.items()
    )


def score_stage_one(v: Mapping[str, float], metric_ids: Sequence[str]) -> float:
    """Plain mean over metrics, every test weighing the same."""
    vector = MetricVector(v)
    if not metric_ids:
        raise ScoringException("Stage-one score needs at least one metric")
    return math.fsum(vector.require(i) for i in metric_ids) / len(metric_ids)


def delta(base_value: float, aux_value: float, curve: TradeoffCurve, w: float) -> float:
    """
    Performance differential against the learned front at importance w.

    >>> from moeval.tradeoff import known_tradeoff
    >>> delta(0.5, 0.25, known_tradeoff("hr", "mred", -2.0, 1.0), 0.5)
    0.0
    """
    if not 0.0 < w < 1.0:
        raise ScoringException(f"Importance weight must lie in (0, 1), got {w}")
    return (1.0 - w) * base_value - w * ev(curve, aux_value)


def score_proposed(
    v: Mapping[str, float],
    curves: Mapping[str, TradeoffCurve],
    weights: WeightConfig,
) -> ProposedScore:
    vector = MetricVector(v)
    base_value = vector.require(weights.base_id)
    deltas: dict[str, float] = {}
    for aux_id in sorted(weights.weights):
        if aux_id not in curves:
            raise ScoringException(
                f"No trade-off curve for auxiliary metric '{aux_id}'"
            )
        curve = curves[aux_id]
        if curve.aux_id != aux_id or curve.base_id != weights.base_id:
            raise ScoringException(
                f"Curve <{curve.base_id}, {curve.aux_id}> does not match "
                f"<{weights.base_id}, {aux_id}>"
            )
        deltas[aux_id] = delta(
            base_value, vector.require(aux_id), curve, weights.weights[aux_id]
        )
    for aux_id in curves:
        if aux_id not in weights.weights:
            raise ScoringException(f"No importance weight for metric '{aux_id}'")
    # fsum is correctly rounded, so the sum ignores aux enumeration order
    return ProposedScore(deltas, math.fsum(deltas.values()))


def dense_ranks(scores: Sequence[float]) -> list[int]:
    """
    Dense ranks, descending in score, ties sharing a rank.

    >>> dense_ranks([0.05, -0.05, 0.05])
    [1, 2, 1]
    """
    if len(scores) == 0:
        return []
    return [int(r) for r in rankdata(-np.asarray(scores, dtype=float), method="dense")]


def rank_models(
    records: Sequence[ModelRecord],
    curves: Mapping[str, TradeoffCurve],
    weights: WeightConfig,
    legacy: LegacyConfig | None = None,
) -> list[ScoreReport]:
    """
    Score canonicalized records and return leaderboard rows sorted by s_p descending,
    model id breaking display ties.
    """
    if len(records) == 0:
        raise ScoringException("No model records to rank")

    reports: list[ScoreReport] = []
    for record in records:
        missing = [
            metric_id
            for metric_id in (weights.base_id, *weights.weights)
            if metric_id not in record.aggregate
        ]
        if missing:
            raise ScoringException(
                f"Model '{record.model_id}' is missing metrics {missing}"
            )
        deltas, s_p = score_proposed(record.aggregate, curves, weights)
        extrapolated = tuple(
            aux_id
            for aux_id in deltas
            if curves[aux_id].extrapolates(record.aggregate[aux_id])
        )
        s_o = None
        thresholded = False
        if legacy is not None:
            s_o = score_legacy(record.aggregate, legacy)
            thresholded = is_thresholded(record.aggregate, legacy)
        reports.append(
            ScoreReport(
                model_id=record.model_id,
                deltas=deltas,
                s_p=s_p,
                rank_p=0,
                s_o=s_o,
                thresholded=thresholded,
                extrapolated=extrapolated,
            )
        )

    ranks_p = dense_ranks([r.s_p for r in reports])
    if legacy is not None:
        ranks_o: list[int | None] = list(
            dense_ranks([r.s_o if r.s_o is not None else 0.0 for r in reports])
        )
    else:
        ranks_o = [None] * len(reports)
    reports = [
        replace(report, rank_p=rank_p, rank_o=rank_o)
        for report, rank_p, rank_o in zip(reports, ranks_p, ranks_o, strict=True)
    ]

    n_thresholded = sum(r.thresholded for r in reports)
    if n_thresholded:
        logger.info(
            f"{n_thresholded} of {len(reports)} models fall below the legacy "
            f"threshold on '{weights.base_id}'"
        )
    return sorted(reports, key=lambda r: (r.rank_p, r.model_id))


def sort_by_legacy(reports: Iterable[ScoreReport]) -> list[ScoreReport]:
    reports = list(reports)
    if any(r.rank_o is None for r in reports):
        raise ScoringException("Legacy ranks are missing, supply a legacy config")
    return sorted(reports, key=lambda r: (r.rank_o, r.model_id))


def implied_legacy_slope(h1: float, h2: float, mr1: float, mr2: float) -> float:
    """
    Slope the legacy normalization implicitly assumes between its best (h1, mr1) and
    baseline (h2, mr2) references.

    >>> implied_legacy_slope(0.5, 0.25, 0.5, 0.25)
    1.0
    """
    if mr1 == mr2:
        raise ScoringException("Implied legacy slope undefined when mr1 == mr2")
    return (h1 - h2) / (mr1 - mr2)


def implied_importance_ratio(
    c1_legacy: float, c1_fitted: float, k_ratio: float
) -> float:
    """
    w / (1 - w) the legacy weighting effectively assigns to the auxiliary metric
    relative to the base, given the legacy slope, the fitted slope and k2 / k1.
    """
    if c1_fitted == 0:
        raise ScoringException("Implied importance undefined for a zero fitted slope")
    if k_ratio <= 0:
        raise ScoringException(f"Legacy weight ratio must be positive, got {k_ratio}")
    return -k_ratio * c1_legacy / c1_fitted


@dataclass(frozen=True)
class RankedScore:
    model_id: str
    score: float
    rank: int
    thresholded: bool = False


def _ranked(scored: Sequence[tuple[str, float, bool]]) -> list[RankedScore]:
    if len(scored) == 0:
        raise ScoringException("No model records to rank")
    ranks = dense_ranks([score for _, score, _ in scored])
    rows = [
        RankedScore(model_id, score, rank, thresholded)
        for (model_id, score, thresholded), rank in zip(scored, ranks, strict=True)
    ]
    return sorted(rows, key=lambda r: (r.rank, r.model_id))


def rank_legacy(
    records: Sequence[ModelRecord], legacy: LegacyConfig
) -> list[RankedScore]:
    """Leaderboard under the legacy normalized weighted mean alone."""
    return _ranked(
        [
            (
                record.model_id,
                score_legacy(record.aggregate, legacy),
                is_thresholded(record.aggregate, legacy),
            )
            for record in records
        ]
    )


def rank_stage_one(
    records: Sequence[ModelRecord], metric_ids: Sequence[str]
) -> list[RankedScore]:
    return _ranked(
        [
            (record.model_id, score_stage_one(record.aggregate, metric_ids), False)
            for record in records
        ]
    )
