"""
Fit the optimal trade-off curve between the base metric and auxiliary metrics.
"""

import argparse

from ..domain import RegistryException
from ..parsers import load_metric_table, load_run_config
from ..report import emit_curve_report, write_output
from ..tradeoff import CurveFamily, fit_tradeoffs
from .common import canonical_records, id_list, registry_for


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument("--input", required=True, help="Metric table CSV.")
    parser.add_argument("--base", help="Base metric id (default: first metric).")
    parser.add_argument(
        "--aux",
        action="append",
        required=True,
        help="Auxiliary metric id, repeat for several curves.",
    )
    parser.add_argument(
        "--family",
        choices=[f.value for f in CurveFamily],
        default=CurveFamily.LINEAR.value,
    )
    parser.add_argument("--config", help="Run config giving metric directions.")
    parser.add_argument(
        "--minimize",
        type=id_list,
        default=(),
        help="Comma separated metrics to minimize when no config is given.",
    )
    parser.add_argument(
        "--output", default="-", help="Curve report path, '-' for stdout (default)."
    )


def main(args: argparse.Namespace):
    records = load_metric_table(args.input)
    config = load_run_config(args.config) if args.config else None
    registry = registry_for(records, config, args.base, args.minimize)
    for aux_id in args.aux:
        if registry.get_spec(aux_id).is_base:
            raise RegistryException(f"'{aux_id}' is the base metric, not an auxiliary")

    curves = fit_tradeoffs(
        canonical_records(records, registry),
        registry.base_id,
        args.aux,
        CurveFamily(args.family),
    )
    write_output(emit_curve_report(curves), args.output)
