"""
Output documents: leaderboards, front and curve reports (JSON) and the back-test
table (CSV). Every real is rendered with 9 significant digits and keys keep a fixed
order, so identical inputs give byte-identical documents.
"""

import json
import os
import sys
import tempfile
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ._version import __version__
from .domain import MetricRegistry, MOEvalException, WeightConfig
from .log import logger
from .pareto import FrontResult
from .scoring import RankedScore, ScoreReport
from .synth import BacktestResult
from .tradeoff import TradeoffCurve

OUTPUT_DIR_ENV = "MOEVAL_OUTPUT_DIR"
SIGNIFICANT_DIGITS = 9
BACKTEST_COLUMNS = (
    "w",
    "model_id",
    "s_p",
    "s_o",
    "rank_p",
    "rank_o",
    "s_p_norm",
    "s_o_norm",
)


class ReportException(MOEvalException):
    pass


def render_real(value: float) -> float | None:
    """
    Round to 9 significant digits; non-finite values have no JSON form and become
    null.

    >>> render_real(1 / 3)
    0.333333333
    """
    if not np.isfinite(value):
        return None
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def _dump(document: Mapping[str, Any]) -> str:
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def _registry_section(registry: MetricRegistry) -> list[dict[str, Any]]:
    return [
        {"id": spec.id, "direction": str(spec.direction), "is_base": spec.is_base}
        for spec in registry.values()
    ]


def _curve_section(curve: TradeoffCurve) -> dict[str, Any]:
    return {
        "base_id": curve.base_id,
        "aux_id": curve.aux_id,
        "family": str(curve.family),
        "slope": render_real(curve.slope),
        "intercept": render_real(curve.intercept),
        "n_front_points": curve.n_front_points,
        "r_squared": render_real(curve.r_squared),
        "fitted": curve.fitted,
        "aux_min": render_real(curve.aux_min),
        "aux_max": render_real(curve.aux_max),
    }


def _curves_section(curves: Mapping[str, TradeoffCurve]) -> dict[str, Any]:
    return {aux_id: _curve_section(curves[aux_id]) for aux_id in sorted(curves)}


def _score_row(report: ScoreReport) -> dict[str, Any]:
    row: dict[str, Any] = {
        "model_id": report.model_id,
        "rank_p": report.rank_p,
        "s_p": render_real(report.s_p),
        "deltas": {k: render_real(v) for k, v in sorted(report.deltas.items())},
        "extrapolated": list(report.extrapolated),
    }
    if report.s_o is not None:
        row["rank_o"] = report.rank_o
        row["s_o"] = render_real(report.s_o)
        row["thresholded"] = report.thresholded
    return row


def emit_leaderboard(
    reports: Sequence[ScoreReport],
    curves: Mapping[str, TradeoffCurve],
    registry: MetricRegistry,
    weights: WeightConfig,
    *,
    version: str = __version__,
) -> str:
    if len(reports) == 0:
        raise ReportException("Cannot emit a leaderboard without rows")
    method = "both" if reports[0].s_o is not None else "proposed"
    document = {
        "version": version,
        "method": method,
        "registry": _registry_section(registry),
        "weights": {
            "base_id": weights.base_id,
            "weights": {k: render_real(w) for k, w in sorted(weights.weights.items())},
        },
        "curves": _curves_section(curves),
        "rows": [
            _score_row(r) for r in sorted(reports, key=lambda r: (r.rank_p, r.model_id))
        ],
    }
    return _dump(document)


def emit_ranking(
    method: str,
    rows: Sequence[RankedScore],
    registry: MetricRegistry,
    *,
    version: str = __version__,
) -> str:
    """Leaderboard for single-score methods (legacy or stage-one mean)."""
    if len(rows) == 0:
        raise ReportException("Cannot emit a leaderboard without rows")
    document = {
        "version": version,
        "method": method,
        "registry": _registry_section(registry),
        "rows": [
            {
                "model_id": row.model_id,
                "rank": row.rank,
                "score": render_real(row.score),
                "thresholded": row.thresholded,
            }
            for row in sorted(rows, key=lambda r: (r.rank, r.model_id))
        ],
    }
    return _dump(document)


def emit_front_report(
    model_ids: Sequence[str],
    result: FrontResult,
    registry: MetricRegistry,
    *,
    version: str = __version__,
) -> str:
    document = {
        "version": version,
        "registry": _registry_section(registry),
        "n_points": len(model_ids),
        "front": [m for i, m in enumerate(model_ids) if result.is_on_front(i)],
        "dominated": [
            {"model_id": model_ids[i], "dominated_by": model_ids[witness]}
            for i, witness in sorted(result.dominated_by.items())
        ],
    }
    return _dump(document)


def emit_curve_report(
    curves: Mapping[str, TradeoffCurve], *, version: str = __version__
) -> str:
    return _dump({"version": version, "curves": _curves_section(curves)})


def emit_backtest_table(result: BacktestResult) -> str:
    frame = pd.DataFrame(
        [
            {
                "w": row.w,
                "model_id": row.model_id,
                "s_p": row.s_p,
                "s_o": row.s_o,
                "rank_p": row.rank_p,
                "rank_o": row.rank_o,
                "s_p_norm": row.s_p_norm,
                "s_o_norm": row.s_o_norm,
            }
            for row in result.rows
        ],
        columns=BACKTEST_COLUMNS,
    )
    return frame.to_csv(
        index=False, float_format="%.9g", na_rep="", lineterminator="\n"
    )


def resolve_output_path(output: Path | str) -> Path:
    """
    Relative paths land under $MOEVAL_OUTPUT_DIR when it is set, the working
    directory otherwise.
    """
    path = Path(output)
    output_dir = os.environ.get(OUTPUT_DIR_ENV)
    if output_dir and not path.is_absolute():
        path = Path(output_dir) / path
    return path


def _current_umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def write_output(text: str, output: Path | str | None) -> Path | None:
    """
    Write a whole document atomically (temp file in the target directory, then
    rename). None or '-' writes to stdout.
    """
    if output is None or str(output) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return None

    path = resolve_output_path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = tempfile.NamedTemporaryFile(
        "w",
        encoding="utf-8",
        newline="",
        dir=path.parent,
        prefix=f".{path.name}.",
        suffix=".tmp",
        delete=False,
    )
    try:
        with tmp:
            tmp.write(text)
        # same mode a plain open would give; temp files start as 0600
        os.chmod(tmp.name, 0o666 & ~_current_umask())
        os.replace(tmp.name, path)
    except BaseException:
        os.unlink(tmp.name)
        raise
    logger.info(f"Wrote {path}")
    return path
