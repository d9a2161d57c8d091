"""
Generate a synthetic model population around a known trade-off front.
"""

import argparse

from ..parsers import emit_metric_table
from ..report import write_output
from ..synth import PopulationSpec, generate_population
from .common import float_range


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument("--slope", type=float, required=True, help="True front slope.")
    parser.add_argument(
        "--intercept", type=float, required=True, help="True front intercept."
    )
    parser.add_argument("--n", type=int, required=True, help="Number of models.")
    parser.add_argument(
        "--noise", type=float, default=0.0, help="One-sided noise below the front."
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--aux-range",
        type=float_range,
        required=True,
        help="Auxiliary value range as lo,hi.",
    )
    parser.add_argument("--base-id", default="hit_rate")
    parser.add_argument("--aux-id", default="mred_activity")
    parser.add_argument(
        "--output", default="-", help="Metric table path, '-' for stdout (default)."
    )


def main(args: argparse.Namespace):
    spec = PopulationSpec(
        true_slope=args.slope,
        true_intercept=args.intercept,
        n_models=args.n,
        aux_range=args.aux_range,
        noise_scale=args.noise,
        seed=args.seed,
        base_id=args.base_id,
        aux_id=args.aux_id,
    )
    records = generate_population(spec)
    write_output(emit_metric_table(records, [spec.base_id, spec.aux_id]), args.output)
