"""
Extract the Pareto front of the models in a metric table.
"""

import argparse

from ..log import logger
from ..pareto import pareto_front
from ..parsers import load_metric_table, load_run_config
from ..report import emit_front_report, write_output
from .common import id_list, registry_for, restrict


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument("--input", required=True, help="Metric table CSV.")
    parser.add_argument(
        "--output", default="-", help="Front report path, '-' for stdout (default)."
    )
    parser.add_argument(
        "--config", help="Run config whose registry gives metric directions."
    )
    parser.add_argument(
        "--minimize",
        type=id_list,
        default=(),
        help="Comma separated metrics to minimize when no config is given.",
    )


def main(args: argparse.Namespace):
    records = load_metric_table(args.input)
    config = load_run_config(args.config) if args.config else None
    registry = registry_for(records, config, minimize=args.minimize)

    points = [restrict(record, registry).aggregate for record in records]
    result = pareto_front(points, registry)
    logger.info(
        f"{len(result.front_indices)} of {len(records)} models are non-dominated"
    )
    model_ids = [record.model_id for record in records]
    write_output(emit_front_report(model_ids, result, registry), args.output)
