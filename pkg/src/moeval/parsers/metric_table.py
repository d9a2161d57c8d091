from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from ..domain import MetricVector, ModelRecord, MOEvalException
from ..log import logger
from .table import ParseException, lineno_of, numeric_column, read_table

METRIC_TABLE_KEYS = ("model_id", "fold")


def parse_metric_table(
    text: str, filename: str = "<metric-table>"
) -> list[ModelRecord]:
    """
    Parse `model_id,fold,<metric-id>...` rows into model records, one fold vector per
    row. An empty fold marks a single pre-aggregated row.
    """
    frame = read_table(text, filename, METRIC_TABLE_KEYS)
    columns = list(frame.columns)
    if columns[:2] != list(METRIC_TABLE_KEYS):
        raise ParseException(
            f"Header must start with {','.join(METRIC_TABLE_KEYS)}", filename, 1
        )
    metric_ids = columns[2:]
    if not metric_ids:
        raise ParseException("Header declares no metric columns", filename, 1)
    values = {m: numeric_column(frame, m, filename) for m in metric_ids}

    folds: dict[str, dict[int | None, MetricVector]] = {}
    for row in range(len(frame)):
        lineno = lineno_of(frame, row)
        model_id = frame["model_id"].iloc[row].strip()
        if not model_id:
            raise ParseException("Empty model_id", filename, lineno)
        fold_cell = frame["fold"].iloc[row].strip()
        if fold_cell == "":
            fold = None
        elif fold_cell.isdigit():
            fold = int(fold_cell)
        else:
            raise ParseException(
                f"Fold must be a nonnegative integer or empty, got {fold_cell!r}",
                filename,
                lineno,
            )

        model_folds = folds.setdefault(model_id, {})
        if fold in model_folds:
            raise ParseException(
                f"Duplicate row for model '{model_id}' fold {fold_cell or '<empty>'}",
                filename,
                lineno,
            )
        if model_folds and (fold is None or None in model_folds):
            raise ParseException(
                f"Model '{model_id}' mixes a pre-aggregated row with fold rows",
                filename,
                lineno,
            )
        try:
            model_folds[fold] = MetricVector(
                {m: float(values[m].iloc[row]) for m in metric_ids}
            )
        except MOEvalException as err:
            raise ParseException(err.msg, filename, lineno) from None

    records = [
        ModelRecord.from_folds(
            model_id,
            [vector for _, vector in sorted(model_folds.items(), key=_fold_order)],
        )
        for model_id, model_folds in folds.items()
    ]
    logger.info(f"Loaded {len(records)} model records from '{filename}'")
    return records


def _fold_order(item: tuple[int | None, MetricVector]) -> int:
    return -1 if item[0] is None else item[0]


def load_metric_table(filename: Path | str) -> list[ModelRecord]:
    path = Path(filename)
    return parse_metric_table(path.read_text(encoding="utf-8"), str(path))


def emit_metric_table(
    records: Sequence[ModelRecord], metric_ids: Sequence[str] | None = None
) -> str:
    """Inverse of parse_metric_table. Reals use their shortest exact repr."""
    if not records:
        raise ParseException("No model records to write", "<metric-table>")
    if metric_ids is None:
        metric_ids = list(records[0].aggregate.keys())
    rows = [
        {"model_id": record.model_id, "fold": fold}
        | {m: vector.require(m) for m in metric_ids}
        for record in records
        for fold, vector in enumerate(record.fold_vectors)
    ]
    frame = pd.DataFrame(rows, columns=[*METRIC_TABLE_KEYS, *metric_ids])
    return frame.to_csv(index=False, lineterminator="\n")
