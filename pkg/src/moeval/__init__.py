from ._version import __version__
from .bncv import (
    Interaction,
    InteractionDataset,
    popularity_baseline,
    random_baseline,
    run_bncv,
)
from .domain import (
    Direction,
    LegacyConfig,
    MetricRegistry,
    MetricSpec,
    MetricVector,
    ModelRecord,
    MOEvalException,
    WeightConfig,
    canonicalize,
)
from .log import set_log_level
from .pareto import dominates, pareto_front
from .parsers import (
    RunConfig,
    load_embeddings,
    load_interactions,
    load_metric_table,
    load_run_config,
)
from .scoring import rank_models, score_legacy, score_proposed
from .tradeoff import TradeoffCurve, fit_tradeoff, known_tradeoff

__all__ = [
    "__version__",
    "Direction",
    "Interaction",
    "InteractionDataset",
    "LegacyConfig",
    "MetricRegistry",
    "MetricSpec",
    "MetricVector",
    "ModelRecord",
    "MOEvalException",
    "RunConfig",
    "TradeoffCurve",
    "WeightConfig",
    "canonicalize",
    "dominates",
    "fit_tradeoff",
    "known_tradeoff",
    "load_embeddings",
    "load_interactions",
    "load_metric_table",
    "load_run_config",
    "pareto_front",
    "popularity_baseline",
    "random_baseline",
    "rank_models",
    "run_bncv",
    "score_legacy",
    "score_proposed",
    "set_log_level",
]
