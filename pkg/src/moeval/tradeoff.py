"""
Learned optimal trade-off curves between the base metric and an auxiliary metric.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .domain import ModelRecord, MOEvalException
from .log import logger
from .pareto import pareto_front_2d

RANGE_RTOL = 1e-8


class TradeoffException(MOEvalException):
    pass


class CurveFamily(StrEnum):
    LINEAR = "linear"


@dataclass(frozen=True)
class TradeoffCurve:
    """
    base = slope * aux + intercept, fitted on the Pareto front of <base, aux> points.
    """

    base_id: str
    aux_id: str
    slope: float
    intercept: float
    n_front_points: int
    r_squared: float
    family: CurveFamily = CurveFamily.LINEAR
    aux_min: float = -np.inf
    aux_max: float = np.inf
    fitted: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.slope) and np.isfinite(self.intercept)):
            raise TradeoffException(
                f"Curve <{self.base_id}, {self.aux_id}> has non-finite coefficients"
            )
        if self.fitted and self.n_front_points < 2:
            raise TradeoffException(
                f"A fitted curve needs at least 2 front points, got "
                f"{self.n_front_points}"
            )

    def extrapolates(self, aux_value: float) -> bool:
        # reports carry the range to 9 significant digits
        low = self.aux_min - RANGE_RTOL * abs(self.aux_min)
        high = self.aux_max + RANGE_RTOL * abs(self.aux_max)
        return not (low <= aux_value <= high)


def ev(curve: TradeoffCurve, aux_value: float) -> float:
    """
    Base-metric value an optimal model should reach at this auxiliary value.

    >>> ev(known_tradeoff("hr", "mred", -2.0, 1.0), 0.25)
    0.5
    """
    if not np.isfinite(aux_value):
        raise TradeoffException(
            f"Cannot evaluate curve at non-finite value {aux_value}"
        )
    if curve.extrapolates(aux_value):
        logger.debug(
            f"Extrapolating <{curve.base_id}, {curve.aux_id}> at {aux_value}, outside "
            f"[{curve.aux_min}, {curve.aux_max}]"
        )
    return curve.slope * aux_value + curve.intercept


def fit_tradeoff(
    data: Sequence[tuple[float, float]],
    family: CurveFamily = CurveFamily.LINEAR,
    base_id: str = "base",
    aux_id: str = "aux",
) -> TradeoffCurve:
    """
    Extract the Pareto front of canonicalized (base, aux) pairs and regress base on aux
    over the front points only.
    """
    if family != CurveFamily.LINEAR:
        raise TradeoffException(f"Unsupported curve family '{family}'")
    if len(data) == 0:
        raise TradeoffException(f"No data to fit <{base_id}, {aux_id}>")
    if not np.all(np.isfinite(np.asarray(data, dtype=float))):
        raise TradeoffException(f"Non-finite values in <{base_id}, {aux_id}> data")

    front = pareto_front_2d(data)
    if len(front) < 2:
        raise TradeoffException(
            f"<{base_id}, {aux_id}> front has {len(front)} point(s), at least 2 needed"
        )
    base = np.array([p[0] for p in front])
    aux = np.array([p[1] for p in front])
    if np.all(aux == aux[0]):
        raise TradeoffException(
            f"<{base_id}, {aux_id}> front points share a single aux value {aux[0]}"
        )

    design = np.column_stack((aux, np.ones(len(aux))))
    (slope, intercept), *_ = np.linalg.lstsq(design, base, rcond=None)

    residuals = base - (slope * aux + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((base - base.mean()) ** 2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    r_squared = float(min(1.0, max(0.0, r_squared)))

    curve = TradeoffCurve(
        base_id=base_id,
        aux_id=aux_id,
        slope=float(slope),
        intercept=float(intercept),
        n_front_points=len(front),
        r_squared=r_squared,
        family=family,
        aux_min=float(aux.min()),
        aux_max=float(aux.max()),
    )
    logger.info(
        f"Fitted <{base_id}, {aux_id}> on {len(front)} of {len(data)} points: "
        f"slope={curve.slope:.6g}, intercept={curve.intercept:.6g}, "
        f"r2={curve.r_squared:.4f}"
    )
    return curve


def update_tradeoff(
    existing_data: Sequence[tuple[float, float]],
    new_points: Sequence[tuple[float, float]],
    family: CurveFamily = CurveFamily.LINEAR,
    base_id: str = "base",
    aux_id: str = "aux",
) -> TradeoffCurve:
    """
    Refit on the union of old and new points. The refit is stateless, so batching
    never changes the result.
    """
    return fit_tradeoff(
        list(existing_data) + list(new_points), family, base_id=base_id, aux_id=aux_id
    )


def known_tradeoff(
    base_id: str, aux_id: str, slope: float, intercept: float
) -> TradeoffCurve:
    """Curve for a relationship known in advance rather than estimated from data."""
    return TradeoffCurve(
        base_id=base_id,
        aux_id=aux_id,
        slope=float(slope),
        intercept=float(intercept),
        n_front_points=0,
        r_squared=1.0,
        fitted=False,
    )


def pairs_for(
    records: Iterable[ModelRecord], base_id: str, aux_id: str
) -> list[tuple[float, float]]:
    return [
        (record.aggregate.require(base_id), record.aggregate.require(aux_id))
        for record in records
    ]


def fit_tradeoffs(
    records: Sequence[ModelRecord],
    base_id: str,
    aux_ids: Iterable[str],
    family: CurveFamily = CurveFamily.LINEAR,
) -> dict[str, TradeoffCurve]:
    """One curve per <base, aux> pair from canonicalized aggregates."""
    return {
        aux_id: fit_tradeoff(
            pairs_for(records, base_id, aux_id), family, base_id=base_id, aux_id=aux_id
        )
        for aux_id in aux_ids
    }
