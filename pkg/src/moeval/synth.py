"""
Synthetic model populations around a known trade-off front, and the back-test grid
comparing the proposed and legacy scores across importance weights.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .domain import (
    LegacyConfig,
    MetricVector,
    ModelRecord,
    MOEvalException,
    WeightConfig,
)
from .log import logger
from .scoring import rank_models
from .tradeoff import TradeoffCurve, fit_tradeoffs

DEFAULT_WEIGHT_GRID = (0.3, 0.4, 0.5, 0.55)
ON_FRONT_SHARE = 0.2
# Score columns spreading less than this are treated as constant
DEGENERATE_SPREAD = 1e-9


class SynthException(MOEvalException):
    pass


@dataclass(frozen=True)
class PopulationSpec:
    true_slope: float
    true_intercept: float
    n_models: int
    aux_range: tuple[float, float]
    noise_scale: float = 0.0
    seed: int = 0
    base_id: str = "hit_rate"
    aux_id: str = "mred_activity"

    def __post_init__(self):
        low, high = self.aux_range
        if not low < high:
            raise SynthException(f"Empty aux range [{low}, {high}]")
        if self.n_models < 1:
            raise SynthException(f"n_models must be positive, got {self.n_models}")
        if self.noise_scale < 0:
            raise SynthException("noise_scale must be nonnegative")
        if self.true_slope >= 0:
            raise SynthException(
                f"A trade-off front needs a negative slope, got {self.true_slope}"
            )
        if self.seed < 0:
            raise SynthException(f"Seed must be nonnegative, got {self.seed}")

    def front_value(self, aux: float) -> float:
        return self.true_slope * aux + self.true_intercept


def generate_population(spec: PopulationSpec) -> list[ModelRecord]:
    """
    Models on or below base = true_slope * aux + true_intercept. At least a fifth sit
    exactly on the front; the rest are pushed strictly below and left of some on-front
    model, so the sample's Pareto front is exactly the on-front subset.
    """
    rng = np.random.default_rng(spec.seed)
    low, high = spec.aux_range

    if spec.noise_scale == 0:
        n_front = spec.n_models
    else:
        n_front = min(spec.n_models, max(2, math.ceil(ON_FRONT_SHARE * spec.n_models)))
    front_aux = np.sort(rng.uniform(low, high, size=n_front))

    points: list[tuple[float, float]] = [
        (spec.front_value(float(a)), float(a)) for a in front_aux
    ]
    for _ in range(spec.n_models - n_front):
        aux = float(rng.uniform(low, float(front_aux[-1])))
        # nearest on-front model to the right caps the base value from above
        anchor = float(front_aux[np.searchsorted(front_aux, aux, side="left")])
        displacement = spec.noise_scale * float(rng.uniform(0.1, 1.0))
        cap = max(0.0, spec.front_value(aux) - spec.front_value(anchor))
        points.append((spec.front_value(aux) - cap - displacement, aux))

    order = rng.permutation(len(points))
    records = []
    for number, index in enumerate(order, start=1):
        base, aux = points[int(index)]
        vector = MetricVector({spec.base_id: base, spec.aux_id: aux})
        records.append(ModelRecord.from_folds(f"synth-{number:04d}", [vector]))
    logger.info(
        f"Generated {len(records)} synthetic models, {n_front} on the front "
        f"(seed {spec.seed})"
    )
    return records


@dataclass(frozen=True)
class BacktestRow:
    model_id: str
    w: float
    s_p: float
    s_o: float
    rank_p: int
    rank_o: int
    s_p_norm: float | None
    s_o_norm: float | None


@dataclass(frozen=True)
class BacktestResult:
    rows: tuple[BacktestRow, ...]
    spearman: dict[float, float | None]
    degenerate: dict[float, tuple[str, ...]]


def _min_max(values: np.ndarray) -> np.ndarray | None:
    spread = values.max() - values.min()
    if spread <= DEGENERATE_SPREAD:
        return None
    return (values - values.min()) / spread


def backtest(
    records: Sequence[ModelRecord],
    weight_grid: Sequence[float],
    legacy: LegacyConfig,
    base_id: str,
    aux_ids: Sequence[str],
    curves: Mapping[str, TradeoffCurve] | None = None,
) -> BacktestResult:
    """
    Fit curves once (unless given), then for each uniform weight score every model
    both ways, min-max normalize each score column and correlate the two rankings.
    """
    if len(weight_grid) == 0:
        raise SynthException("Back-test needs a non-empty weight grid")
    if curves is None:
        curves = fit_tradeoffs(records, base_id, aux_ids)

    rows: list[BacktestRow] = []
    spearman: dict[float, float | None] = {}
    degenerate: dict[float, tuple[str, ...]] = {}
    for w in weight_grid:
        reports = rank_models(
            records, curves, WeightConfig.uniform(base_id, aux_ids, w), legacy
        )
        s_p = np.array([r.s_p for r in reports])
        s_o = np.array([r.s_o for r in reports], dtype=float)
        s_p_norm = _min_max(s_p)
        s_o_norm = _min_max(s_o)
        flagged = tuple(
            name
            for name, column in (("s_p", s_p_norm), ("s_o", s_o_norm))
            if column is None
        )
        degenerate[w] = flagged
        if flagged:
            logger.warning(
                f"w={w}: constant {' and '.join(flagged)} column, normalization skipped"
            )
            spearman[w] = None
        else:
            spearman[w] = float(spearmanr(s_p, s_o).statistic)

        for i, report in enumerate(reports):
            rows.append(
                BacktestRow(
                    model_id=report.model_id,
                    w=w,
                    s_p=report.s_p,
                    s_o=float(s_o[i]),
                    rank_p=report.rank_p,
                    rank_o=report.rank_o if report.rank_o is not None else 0,
                    s_p_norm=None if s_p_norm is None else float(s_p_norm[i]),
                    s_o_norm=None if s_o_norm is None else float(s_o_norm[i]),
                )
            )
    return BacktestResult(tuple(rows), spearman, degenerate)
