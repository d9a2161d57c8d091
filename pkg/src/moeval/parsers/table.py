import csv
from collections.abc import Sequence
from io import StringIO

import pandas as pd

from ..domain import MOEvalException


class ParseException(MOEvalException):
    def __init__(self, msg: str, filename: str = "<...>", lineno: int | None = None):
        super().__init__(msg)
        self.filename = filename
        self.lineno = lineno

    def __str__(self) -> str:
        if self.lineno is None:
            return f"{self.filename}: {self.msg}"
        return f"{self.filename}:{self.lineno}: {self.msg}"


def lineno_of(frame: pd.DataFrame, position: int) -> int:
    """Source line of the data row at this position; frames are indexed by line."""
    return int(frame.index[position])


def _numbered_records(text: str) -> list[tuple[int, list[str]]]:
    """Non-blank CSV records with the line each one starts on."""
    reader = csv.reader(StringIO(text))
    records = []
    start = 1
    for row in reader:
        if row:
            records.append((start, row))
        start = reader.line_num + 1
    return records


def read_table(
    text: str, filename: str, required: Sequence[str] = ()
) -> pd.DataFrame:
    """
    Read a UTF-8 CSV document as strings, rejecting ragged rows and missing columns.
    Empty cells stay as empty strings and blank lines are skipped.
    """
    try:
        records = _numbered_records(text)
    except csv.Error as err:
        raise ParseException(f"Unreadable table: {err}", filename) from None
    if not records:
        raise ParseException("Document is empty", filename)
    (header_line, raw_header), body = records[0], records[1:]
    header = [cell.strip() for cell in raw_header]
    if len(set(header)) != len(header) or "" in header:
        raise ParseException(f"Malformed header {raw_header}", filename, header_line)
    missing = [c for c in required if c not in header]
    if missing:
        raise ParseException(
            f"Header lacks required columns {missing}", filename, header_line
        )
    for lineno, row in body:
        if len(row) != len(header):
            raise ParseException(
                f"Ragged row with {len(row)} fields, header has {len(header)}",
                filename,
                lineno,
            )
    return pd.DataFrame(
        [row for _, row in body],
        columns=header,
        index=pd.Index([lineno for lineno, _ in body], dtype="int64"),
        dtype=str,
    )


def numeric_column(frame: pd.DataFrame, column: str, filename: str) -> pd.Series:
    cells = frame[column].str.strip()
    bad = pd.to_numeric(cells, errors="coerce").isna()
    if bad.any():
        first = int(bad.to_numpy().nonzero()[0][0])
        raise ParseException(
            f"Non-numeric value {frame[column].iloc[first]!r} in column '{column}'",
            filename,
            lineno_of(frame, first),
        )
    # to_numeric may be off by an ulp; astype(float) rounds correctly, so an
    # emitted repr reads back bit for bit
    return cells.astype(float)
