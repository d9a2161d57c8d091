"""
Pareto dominance and non-dominated set extraction over metric vectors.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .domain import MetricRegistry, MOEvalException, canonicalize
from .log import logger


class ParetoException(MOEvalException):
    pass


@dataclass(frozen=True)
class FrontResult:
    front_indices: frozenset[int]
    dominated_by: dict[int, int] = field(default_factory=dict)

    def is_on_front(self, index: int) -> bool:
        return index in self.front_indices


def _as_matrix(
    points: Sequence[Mapping[str, float]], registry: MetricRegistry
) -> np.ndarray:
    ids = registry.ids
    rows = []
    for index, point in enumerate(points):
        if set(point.keys()) != set(ids):
            raise ParetoException(
                f"Point {index} metrics {sorted(point)} do not match the registry "
                f"{sorted(ids)}"
            )
        rows.append(canonicalize(point, registry).to_array(ids))
    return np.array(rows, dtype=float).reshape(len(points), len(ids))


def _dominates_rows(a: np.ndarray, b: np.ndarray) -> bool:
    return bool(np.all(a >= b) and np.any(a > b))


def dominates(
    a: Mapping[str, float], b: Mapping[str, float], registry: MetricRegistry
) -> bool:
    """
    True iff a is at least as good as b on every metric and strictly better on one.

    >>> registry = MetricRegistry.maximizing(["m1", "m2"])
    >>> dominates({"m1": 0.5, "m2": 0.5}, {"m1": 0.4, "m2": 0.4}, registry)
    True
    >>> dominates({"m1": 0.6, "m2": 0.3}, {"m1": 0.4, "m2": 0.5}, registry)
    False
    """
    matrix = _as_matrix([a, b], registry)
    return _dominates_rows(matrix[0], matrix[1])


def _front_of_matrix(matrix: np.ndarray) -> FrontResult:
    n = matrix.shape[0]
    if n == 0:
        raise ParetoException("Cannot extract a Pareto front from an empty point set")

    # A dominator is always lexicographically greater than what it dominates, so
    # walking points in descending lexicographic order only ever needs to compare
    # against the front found so far.
    order = sorted(range(n), key=lambda i: tuple(matrix[i]), reverse=True)

    front: list[int] = []
    dominated_by: dict[int, int] = {}
    for i in order:
        if front:
            candidates = matrix[front]
            mask = np.all(candidates >= matrix[i], axis=1) & np.any(
                candidates > matrix[i], axis=1
            )
            if mask.any():
                dominated_by[i] = front[int(np.argmax(mask))]
                continue
        front.append(i)

    logger.debug(f"Pareto front holds {len(front)} of {n} points")
    return FrontResult(frozenset(front), dict(sorted(dominated_by.items())))


def pareto_front(
    points: Sequence[Mapping[str, float]], registry: MetricRegistry
) -> FrontResult:
    """
    Split points into the non-dominated front and dominated points, each dominated
    point paired with one witness that dominates it. Exact duplicates never dominate
    each other, so every copy of a front point stays on the front.
    """
    if len(points) == 0:
        raise ParetoException("Cannot extract a Pareto front from an empty point set")
    return _front_of_matrix(_as_matrix(points, registry))


def pareto_front_2d(
    pairs: Sequence[tuple[float, float]],
) -> list[tuple[float, float]]:
    """
    Front of canonicalized (base_value, aux_value) pairs, sorted by ascending aux value,
    then descending base value, then input order.

    >>> pareto_front_2d([(0.8, 0.1), (0.5, 0.1)])
    [(0.8, 0.1)]
    """
    if len(pairs) == 0:
        raise ParetoException("Cannot extract a Pareto front from an empty point set")
    matrix = np.array(pairs, dtype=float).reshape(len(pairs), 2)
    if not np.all(np.isfinite(matrix)):
        raise ParetoException("Pareto front input contains non-finite values")

    result = _front_of_matrix(matrix)
    kept = sorted(
        result.front_indices, key=lambda i: (matrix[i, 1], -matrix[i, 0], i)
    )
    return [(float(matrix[i, 0]), float(matrix[i, 1])) for i in kept]
