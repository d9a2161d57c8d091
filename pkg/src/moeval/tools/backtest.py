"""
Compare proposed and legacy scores across importance weights.
"""

import argparse

from ..log import logger
from ..parsers import ConfigException, load_metric_table, load_run_config
from ..report import emit_backtest_table, write_output
from ..synth import DEFAULT_WEIGHT_GRID, backtest
from .common import canonical_records, float_list


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument("--input", required=True, help="Metric table CSV.")
    parser.add_argument(
        "--config", required=True, help="Run config JSON with a 'legacy' section."
    )
    parser.add_argument(
        "--weights",
        type=float_list,
        default=DEFAULT_WEIGHT_GRID,
        help="Comma separated importance weights (default 0.3,0.4,0.5,0.55).",
    )
    parser.add_argument(
        "--output", default="-", help="Back-test CSV path, '-' for stdout (default)."
    )


def main(args: argparse.Namespace):
    config = load_run_config(args.config)
    registry = config.registry
    records = canonical_records(load_metric_table(args.input), registry)
    legacy = config.resolve_legacy(records)
    if legacy is None:
        raise ConfigException("Back-test needs a 'legacy' config section")

    aux_ids = tuple(config.weights.weights) or registry.aux_ids
    curves = config.curves if all(a in config.curves for a in aux_ids) else None
    if curves is not None:
        curves = {aux_id: curves[aux_id] for aux_id in aux_ids}

    result = backtest(records, args.weights, legacy, registry.base_id, aux_ids, curves)
    for w, rho in result.spearman.items():
        shown = "undefined" if rho is None else f"{rho:.4f}"
        logger.info(f"w={w}: spearman(s_p, s_o) = {shown}")
    write_output(emit_backtest_table(result), args.output)
