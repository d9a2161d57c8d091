"""
Evaluate baseline recommenders with bootstrapped nested cross-validation.
"""

import argparse

from ..bncv import default_metric_suite, popularity_baseline, random_baseline, run_bncv
from ..parsers import (
    BNCVSettings,
    emit_metric_table,
    load_embeddings,
    load_interactions,
    load_run_config,
)
from ..report import write_output

ALGORITHMS = ("popularity", "random")


def add_parser_args(parser: argparse.ArgumentParser):
    parser.add_argument("--dataset", required=True, help="Interactions CSV.")
    parser.add_argument(
        "--embeddings", help="Item embeddings CSV, enables embedding metrics."
    )
    parser.add_argument(
        "--algo",
        nargs="+",
        choices=ALGORITHMS,
        default=["popularity"],
        help="Algorithms to evaluate, one model row group each.",
    )
    parser.add_argument("--folds", type=int, help="Bootstrap iterations (default 4).")
    parser.add_argument("--seed", type=int, help="Master seed (default 0).")
    parser.add_argument(
        "--k", type=int, help="Recommendation list length (default 10)."
    )
    parser.add_argument(
        "--buckets", type=int, default=3, help="Quantile buckets for popularity slices."
    )
    parser.add_argument(
        "--config", help="Run config whose 'bncv' section sets defaults."
    )
    parser.add_argument(
        "--output", default="-", help="Metric table path, '-' for stdout (default)."
    )


def main(args: argparse.Namespace):
    defaults = load_run_config(args.config).bncv if args.config else BNCVSettings()
    settings = BNCVSettings(
        n_folds=args.folds if args.folds is not None else defaults.n_folds,
        seed=args.seed if args.seed is not None else defaults.seed,
        k_top=args.k if args.k is not None else defaults.k_top,
    )

    dataset = load_interactions(args.dataset)
    embeddings = load_embeddings(args.embeddings) if args.embeddings else None
    suite = default_metric_suite(dataset, embeddings)

    records = []
    for name in dict.fromkeys(args.algo):
        if name == "popularity":
            algo = popularity_baseline()
        else:
            algo = random_baseline(settings.seed)
        records.append(
            run_bncv(
                algo,
                dataset,
                settings.n_folds,
                settings.seed,
                suite,
                settings.k_top,
                embeddings=embeddings,
                n_buckets=args.buckets,
            )
        )
    write_output(emit_metric_table(records), args.output)
