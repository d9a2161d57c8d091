"""
Rank the models of a metric table into a leaderboard.
"""

import argparse

from ..log import logger
from ..parsers import (
    ConfigException,
    load_curve_report,
    load_metric_table,
    load_run_config,
)
from ..report import emit_leaderboard, emit_ranking, write_output
from ..scoring import rank_legacy, rank_models, rank_stage_one
from ..tradeoff import fit_tradeoffs
from .common import canonical_records

METHODS = ("proposed", "legacy", "both", "mean")


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument("--input", required=True, help="Metric table CSV.")
    parser.add_argument("--config", required=True, help="Run config JSON.")
    parser.add_argument(
        "--method",
        choices=METHODS,
        default="both",
        help="proposed: trade-off aware score, legacy: normalized weighted mean, "
        "both: proposed with legacy columns, mean: stage-one equal-weight mean.",
    )
    parser.add_argument(
        "--curves",
        help="Curve report from `moeval fit`. Missing curves are fitted on the input.",
    )
    parser.add_argument(
        "--output", default="-", help="Leaderboard path, '-' for stdout (default)."
    )


def main(args: argparse.Namespace):
    config = load_run_config(args.config)
    registry = config.registry
    records = canonical_records(load_metric_table(args.input), registry)

    if args.method == "mean":
        rows = rank_stage_one(records, registry.ids)
        write_output(emit_ranking("mean", rows, registry), args.output)
        return

    legacy = config.resolve_legacy(records)
    if legacy is None and args.method in ("legacy", "both"):
        raise ConfigException(f"Method '{args.method}' needs a 'legacy' config section")
    if args.method == "legacy":
        write_output(
            emit_ranking("legacy", rank_legacy(records, legacy), registry), args.output
        )
        return

    curves = dict(config.curves)
    if args.curves:
        curves.update(load_curve_report(args.curves))
    missing = [aux_id for aux_id in config.weights.weights if aux_id not in curves]
    if missing:
        logger.info(f"Fitting trade-off curves for {missing} on the scored models")
        curves.update(fit_tradeoffs(records, registry.base_id, missing))
    curves = {aux_id: curves[aux_id] for aux_id in config.weights.weights}

    reports = rank_models(
        records, curves, config.weights, legacy if args.method == "both" else None
    )
    write_output(
        emit_leaderboard(reports, curves, registry, config.weights), args.output
    )
