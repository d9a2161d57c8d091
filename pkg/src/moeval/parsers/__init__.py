from .config import (
    BNCVSettings,
    ConfigException,
    RunConfig,
    load_run_config,
    parse_run_config,
)
from .curves import load_curve_report, parse_curve_report
from .embeddings import load_embeddings, parse_embeddings
from .interactions import load_interactions, parse_interactions
from .metric_table import emit_metric_table, load_metric_table, parse_metric_table
from .table import ParseException

__all__ = [
    "BNCVSettings",
    "ConfigException",
    "ParseException",
    "RunConfig",
    "emit_metric_table",
    "load_curve_report",
    "load_embeddings",
    "load_interactions",
    "load_metric_table",
    "load_run_config",
    "parse_curve_report",
    "parse_embeddings",
    "parse_interactions",
    "parse_metric_table",
    "parse_run_config",
]
