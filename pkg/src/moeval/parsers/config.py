"""
Run configuration documents (JSON).

{
  "registry": [{"id": "hit_rate", "direction": "maximize", "is_base": true}, ...],
  "weights": {"mred_activity": 0.5},
  "legacy": {"category_weights": {...}, "baseline": {...}, "best": {...},
             "base_threshold": 0.01},
  "bncv": {"n_folds": 4, "seed": 0, "k_top": 10},
  "curves": {"mred_activity": {"slope": -7.944, "intercept": 0.05}},
  "paths": {"input": "...", "output": "..."}
}

`legacy` may name a `baseline_model` instead of `baseline`/`best`, in which case the
references are derived from the scored records. Reference values are given in each
metric's own direction; the base threshold applies to the canonical base value.
"""

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..domain import (
    LegacyConfig,
    MetricRegistry,
    MetricSpec,
    MetricVector,
    ModelRecord,
    MOEvalException,
    WeightConfig,
    canonicalize,
)
from ..tradeoff import TradeoffCurve, known_tradeoff


class ConfigException(MOEvalException):
    pass


@dataclass(frozen=True)
class BNCVSettings:
    n_folds: int = 4
    seed: int = 0
    k_top: int = 10

    def __post_init__(self):
        if self.n_folds < 1 or self.k_top < 1 or self.seed < 0:
            raise ConfigException(
                f"Invalid BNCV settings: n_folds={self.n_folds}, seed={self.seed}, "
                f"k_top={self.k_top}"
            )


@dataclass(frozen=True)
class RunConfig:
    registry: MetricRegistry
    weights: WeightConfig
    legacy: LegacyConfig | None = None
    legacy_baseline_model: str | None = None
    legacy_category_weights: Mapping[str, float] = field(default_factory=dict)
    legacy_threshold: float = 0.0
    bncv: BNCVSettings = field(default_factory=BNCVSettings)
    curves: Mapping[str, TradeoffCurve] = field(default_factory=dict)
    paths: Mapping[str, str] = field(default_factory=dict)

    @property
    def has_legacy(self) -> bool:
        return self.legacy is not None or self.legacy_baseline_model is not None

    def resolve_legacy(self, records: Sequence[ModelRecord]) -> LegacyConfig | None:
        """Legacy config, deriving references from canonical records when needed."""
        if self.legacy is not None or self.legacy_baseline_model is None:
            return self.legacy
        try:
            return LegacyConfig.from_stage_one(
                records,
                self.legacy_baseline_model,
                self.legacy_category_weights,
                self.legacy_threshold,
                self.registry.base_id,
            )
        except MOEvalException as err:
            raise ConfigException(err.msg) from err


def _section(doc: Mapping[str, Any], key: str, kind: type) -> Any:
    value = doc.get(key)
    if value is not None and not isinstance(value, kind):
        raise ConfigException(f"Config '{key}' must be a {kind.__name__}")
    return value


def _parse_registry(entries: Any) -> MetricRegistry:
    if not isinstance(entries, list) or not entries:
        raise ConfigException("Config 'registry' must be a non-empty list")
    specs = []
    for entry in entries:
        if not isinstance(entry, Mapping) or "id" not in entry:
            raise ConfigException(f"Invalid registry entry {entry!r}")
        specs.append(
            MetricSpec(
                str(entry["id"]),
                entry.get("direction", "maximize"),
                bool(entry.get("is_base", False)),
            )
        )
    return MetricRegistry.from_specs(specs)


def _parse_legacy(doc: Mapping[str, Any], registry: MetricRegistry) -> dict[str, Any]:
    category_weights = {
        str(k): float(v) for k, v in doc.get("category_weights", {}).items()
    }
    for metric_id in category_weights:
        registry.get_spec(metric_id)
    threshold = float(doc.get("base_threshold", 0.0))

    if "baseline_model" in doc:
        return {
            "legacy_baseline_model": str(doc["baseline_model"]),
            "legacy_category_weights": category_weights,
            "legacy_threshold": threshold,
        }
    if "baseline" not in doc or "best" not in doc:
        raise ConfigException(
            "Config 'legacy' needs 'baseline' and 'best' references or a "
            "'baseline_model'"
        )
    return {
        "legacy": LegacyConfig(
            base_id=registry.base_id,
            category_weights=category_weights,
            baseline_ref=canonicalize(MetricVector(doc["baseline"]), registry),
            best_ref=canonicalize(MetricVector(doc["best"]), registry),
            base_threshold=threshold,
        )
    }


def parse_run_config(text: str, filename: str = "<config>") -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigException(f"{filename}: invalid JSON: {err}") from None
    if not isinstance(doc, Mapping):
        raise ConfigException(f"{filename}: top level must be an object")

    try:
        registry = _parse_registry(doc.get("registry"))
        weights_doc = _section(doc, "weights", Mapping) or {}
        weights = WeightConfig(
            registry.base_id, {str(k): float(v) for k, v in weights_doc.items()}
        )
        weights.validate_against(registry)

        legacy_doc = _section(doc, "legacy", Mapping)
        legacy = _parse_legacy(legacy_doc, registry) if legacy_doc is not None else {}

        bncv_doc = _section(doc, "bncv", Mapping) or {}
        bncv = BNCVSettings(**{k: int(v) for k, v in bncv_doc.items()})

        curves = {}
        for aux_id, curve_doc in (_section(doc, "curves", Mapping) or {}).items():
            registry.get_spec(aux_id)
            curves[aux_id] = known_tradeoff(
                registry.base_id,
                aux_id,
                float(curve_doc["slope"]),
                float(curve_doc["intercept"]),
            )

        paths_doc = _section(doc, "paths", Mapping) or {}
        paths = {str(k): str(v) for k, v in paths_doc.items()}
    except ConfigException as err:
        raise ConfigException(f"{filename}: {err.msg}") from None
    except MOEvalException as err:
        raise ConfigException(f"{filename}: {err.msg}") from err
    except (KeyError, TypeError, ValueError) as err:
        raise ConfigException(f"{filename}: malformed value: {err}") from err

    return RunConfig(
        registry=registry,
        weights=weights,
        bncv=bncv,
        curves=curves,
        paths=paths,
        **legacy,
    )


def load_run_config(filename: Path | str) -> RunConfig:
    path = Path(filename)
    return parse_run_config(path.read_text(encoding="utf-8"), str(path))
