"""
Argument types and record loading shared by the subcommands.
"""

import argparse
from collections.abc import Sequence

from ..domain import (
    MetricRegistry,
    MetricSpec,
    MetricVector,
    ModelRecord,
    RegistryException,
    canonicalize_record,
    require_complete,
)
from ..parsers import RunConfig


def float_list(text: str) -> tuple[float, ...]:
    """argparse type for comma separated reals, e.g. `0.3,0.4`."""
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid real list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def float_range(text: str) -> tuple[float, float]:
    values = float_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi but got {text!r}")
    return values[0], values[1]


def id_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def registry_for(
    records: Sequence[ModelRecord],
    config: RunConfig | None = None,
    base_id: str | None = None,
    minimize: Sequence[str] = (),
) -> MetricRegistry:
    """
    The config registry when given, otherwise every metric column of the table with
    `base_id` (default: first column) as base and `minimize` ids flipped.
    """
    if config is not None:
        return config.registry
    ids = list(records[0].aggregate.keys())
    for metric_id in (*minimize, *([base_id] if base_id else [])):
        if metric_id not in ids:
            raise RegistryException(f"Unknown metric id '{metric_id}'")
    base_id = base_id or ids[0]
    return MetricRegistry.from_specs(
        MetricSpec(
            i,
            "minimize" if i in minimize else "maximize",
            is_base=(i == base_id),
        )
        for i in ids
    )


def restrict(record: ModelRecord, registry: MetricRegistry) -> ModelRecord:
    """Drop metric columns the registry does not declare."""
    return ModelRecord.from_folds(
        record.model_id,
        [
            MetricVector({i: v.require(i) for i in registry.ids})
            for v in record.fold_vectors
        ],
    )


def canonical_records(
    records: Sequence[ModelRecord], registry: MetricRegistry
) -> list[ModelRecord]:
    require_complete(records, registry.ids)
    return [canonicalize_record(restrict(r, registry), registry) for r in records]
