import math
from collections import OrderedDict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np

from .log import logger


class MOEvalException(Exception):
    def __init__(self, msg: str):
        self.msg = msg

    def __str__(self) -> str:
        return self.msg


class RegistryException(MOEvalException):
    pass


class MetricVectorException(MOEvalException):
    pass


class Direction(StrEnum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


@dataclass(frozen=True)
class MetricSpec:
    id: str
    direction: Direction = Direction.MAXIMIZE
    is_base: bool = False

    def __post_init__(self):
        if not self.id:
            raise RegistryException("Metric id must be a non-empty string")
        if not isinstance(self.direction, Direction):
            try:
                object.__setattr__(self, "direction", Direction(self.direction))
            except ValueError as err:
                raise RegistryException(
                    f"Invalid direction '{self.direction}' for metric '{self.id}'"
                ) from err


class MetricRegistry(OrderedDict[str, MetricSpec]):
    """
    Ordered collection of metric specs keyed by id, with exactly one base metric.

    >>> registry = MetricRegistry.from_specs(
    ...     [MetricSpec("hr", is_base=True), MetricSpec("latency", "minimize")]
    ... )
    >>> registry.base_id, registry.aux_ids
    ('hr', ('latency',))
    """

    @classmethod
    def from_specs(cls, specs: Iterable[MetricSpec]) -> "MetricRegistry":
        registry = cls()
        for spec in specs:
            if spec.id in registry:
                raise RegistryException(f"Duplicate metric id '{spec.id}'")
            registry[spec.id] = spec
        registry.validate()
        return registry

    @classmethod
    def maximizing(cls, ids: Sequence[str], base_id: str | None = None):
        """All metrics maximized, the base defaulting to the first id."""
        base_id = base_id if base_id is not None else ids[0]
        return cls.from_specs(MetricSpec(i, is_base=(i == base_id)) for i in ids)

    def validate(self) -> None:
        bases = [spec.id for spec in self.values() if spec.is_base]
        if len(bases) != 1:
            raise RegistryException(
                f"Registry must declare exactly one base metric, found {bases}"
            )

    @property
    def base_id(self) -> str:
        return next(spec.id for spec in self.values() if spec.is_base)

    @property
    def aux_ids(self) -> tuple[str, ...]:
        return tuple(spec.id for spec in self.values() if not spec.is_base)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(self.keys())

    def get_spec(self, metric_id: str) -> MetricSpec:
        try:
            return self[metric_id]
        except KeyError:
            raise RegistryException(f"Unknown metric id '{metric_id}'") from None


class MetricVector(Mapping[str, float]):
    """
    Immutable mapping from metric id to a finite real value.

    >>> MetricVector({"hr": 0.5})["hr"]
    0.5
    """

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[str, float] | None = None, **kwargs: float):
        merged = dict(values or {}, **kwargs)
        checked: dict[str, float] = {}
        for key, value in merged.items():
            try:
                number = float(value)
            except (TypeError, ValueError):
                raise MetricVectorException(
                    f"Metric '{key}' has non-numeric value {value!r}"
                ) from None
            if not np.isfinite(number):
                raise MetricVectorException(
                    f"Metric '{key}' has non-finite value {number}"
                )
            checked[key] = number
        self._values = checked

    def __getitem__(self, key: str) -> float:
        return self._values[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def __repr__(self) -> str:
        return f"MetricVector({self._values!r})"

    def require(self, metric_id: str) -> float:
        try:
            return self._values[metric_id]
        except KeyError:
            raise MetricVectorException(f"Missing metric '{metric_id}'") from None

    def to_array(self, ids: Sequence[str]) -> np.ndarray:
        return np.array([self.require(i) for i in ids], dtype=float)


@dataclass(frozen=True)
class ModelRecord:
    model_id: str
    fold_vectors: tuple[MetricVector, ...]
    aggregate: MetricVector
    dispersion: MetricVector

    @classmethod
    def from_folds(
        cls, model_id: str, fold_vectors: Sequence[MetricVector]
    ) -> "ModelRecord":
        mean, std = aggregate_folds(fold_vectors)
        return cls(model_id, tuple(fold_vectors), mean, std)

    @property
    def n_folds(self) -> int:
        return len(self.fold_vectors)


@dataclass(frozen=True)
class WeightConfig:
    base_id: str
    weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.base_id in self.weights:
            raise RegistryException(
                f"Base metric '{self.base_id}' cannot carry an importance weight"
            )
        for metric_id, w in self.weights.items():
            if not 0.0 < w < 1.0:
                raise RegistryException(
                    f"Importance weight for '{metric_id}' must lie in (0, 1), got {w}"
                )

    @classmethod
    def uniform(cls, base_id: str, aux_ids: Iterable[str], w: float) -> "WeightConfig":
        return cls(base_id, {aux_id: w for aux_id in aux_ids})

    def validate_against(self, registry: MetricRegistry) -> None:
        if self.base_id != registry.base_id:
            raise RegistryException(
                f"Weights declare base '{self.base_id}' but the registry base is "
                f"'{registry.base_id}'"
            )
        for metric_id in self.weights:
            registry.get_spec(metric_id)


@dataclass(frozen=True)
class LegacyConfig:
    base_id: str
    category_weights: Mapping[str, float]
    baseline_ref: MetricVector
    best_ref: MetricVector
    base_threshold: float = 0.0

    def __post_init__(self):
        if self.base_threshold < 0:
            raise RegistryException("Legacy base threshold must be nonnegative")
        if any(k < 0 for k in self.category_weights.values()):
            raise RegistryException("Legacy category weights must be nonnegative")
        total = sum(self.category_weights.values())
        if not np.isclose(total, 1.0, rtol=0.0, atol=1e-9):
            raise RegistryException(
                f"Legacy category weights must sum to 1, got {total}"
            )
        for metric_id in self.category_weights:
            base = self.baseline_ref.require(metric_id)
            best = self.best_ref.require(metric_id)
            if best == base:
                raise RegistryException(
                    f"Legacy best and baseline references coincide for '{metric_id}'"
                )
        self.baseline_ref.require(self.base_id)

    @classmethod
    def from_stage_one(
        cls,
        records: Sequence[ModelRecord],
        baseline_model_id: str,
        category_weights: Mapping[str, float],
        base_threshold: float,
        base_id: str,
    ) -> "LegacyConfig":
        """
        Derive references from stage-one submissions: the provided baseline model and,
        per metric, the best canonical value any submission reached.
        """
        by_id = {record.model_id: record for record in records}
        if baseline_model_id not in by_id:
            raise RegistryException(
                f"Baseline model '{baseline_model_id}' not found among stage-one "
                "records"
            )
        baseline = by_id[baseline_model_id].aggregate
        best = MetricVector(
            {
                metric_id: max(r.aggregate.require(metric_id) for r in records)
                for metric_id in baseline
            }
        )
        logger.info(
            f"Derived legacy references from {len(records)} stage-one records "
            f"with baseline '{baseline_model_id}'"
        )
        return cls(base_id, dict(category_weights), baseline, best, base_threshold)


def canonicalize(v: Mapping[str, float], registry: MetricRegistry) -> MetricVector:
    """
    Orient every metric so that larger is better.

    >>> registry = MetricRegistry.from_specs(
    ...     [MetricSpec("hr", is_base=True), MetricSpec("latency", "minimize")]
    ... )
    >>> dict(canonicalize({"hr": 0.5, "latency": 2.0}, registry))
    {'hr': 0.5, 'latency': -2.0}
    """
    out: dict[str, float] = {}
    for metric_id, value in MetricVector(v).items():
        spec = registry.get_spec(metric_id)
        out[metric_id] = -value if spec.direction == Direction.MINIMIZE else value
    return MetricVector(out)


def canonicalize_record(record: ModelRecord, registry: MetricRegistry) -> ModelRecord:
    return ModelRecord.from_folds(
        record.model_id, [canonicalize(v, registry) for v in record.fold_vectors]
    )


def aggregate_folds(
    fold_vectors: Sequence[Mapping[str, float]],
) -> tuple[MetricVector, MetricVector]:
    """
    Per-metric mean and sample (n - 1) standard deviation over folds. Both come
    from exactly rounded sums, so the fold order never changes them.
    """
    if len(fold_vectors) == 0:
        raise MetricVectorException("Cannot aggregate an empty list of folds")

    ids = list(fold_vectors[0].keys())
    for index, vector in enumerate(fold_vectors):
        if set(vector.keys()) != set(ids):
            raise MetricVectorException(
                f"Fold {index} metrics {sorted(vector)} differ from fold 0 "
                f"{sorted(ids)}"
            )

    values = np.array(
        [[MetricVector(v).require(i) for i in ids] for v in fold_vectors], dtype=float
    )
    n = len(fold_vectors)
    mean = np.array([math.fsum(column) for column in values.T]) / n
    if n > 1:
        deviations = (values - mean) ** 2
        std = np.sqrt([math.fsum(column) / (n - 1) for column in deviations.T])
    else:
        std = np.zeros(len(ids))
    constant = np.ptp(values, axis=0) == 0
    mean[constant] = values[0, constant]
    std[constant] = 0.0
    return (
        MetricVector(dict(zip(ids, mean.tolist(), strict=True))),
        MetricVector(dict(zip(ids, std.tolist(), strict=True))),
    )


def require_complete(records: Iterable[ModelRecord], ids: Iterable[str]) -> None:
    ids = list(ids)
    for record in records:
        missing = [i for i in ids if i not in record.aggregate]
        if missing:
            raise MetricVectorException(
                f"Model '{record.model_id}' is missing metrics {missing}"
            )
