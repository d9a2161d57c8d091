from pathlib import Path

import numpy as np

from ..log import logger
from ..rsmetrics import ItemEmbeddings
from .table import ParseException, lineno_of, numeric_column, read_table

NORM_TOLERANCE = 1e-6


def parse_embeddings(text: str, filename: str = "<embeddings>") -> ItemEmbeddings:
    """
    Parse `item_id,d0,d1,...` rows. Vectors off unit norm by more than 1e-6 are
    L2-normalized on load and listed in `normalized_items`.
    """
    frame = read_table(text, filename, ("item_id",))
    dims = [c for c in frame.columns if c != "item_id"]
    if len(dims) < 2 or dims != [f"d{i}" for i in range(len(dims))]:
        raise ParseException(
            f"Embedding header must be item_id,d0,d1,... with at least two "
            f"dimensions, got {list(frame.columns)}",
            filename,
            1,
        )
    matrix = np.column_stack([numeric_column(frame, d, filename) for d in dims])
    if not np.all(np.isfinite(matrix)):
        raise ParseException("Non-finite embedding component", filename)

    vectors: dict[str, np.ndarray] = {}
    normalized: list[str] = []
    for row in range(len(frame)):
        lineno = lineno_of(frame, row)
        item_id = frame["item_id"].iloc[row].strip()
        if item_id in vectors:
            raise ParseException(
                f"Duplicate embedding for '{item_id}'", filename, lineno
            )
        vector = matrix[row].astype(float)
        norm = float(np.linalg.norm(vector))
        if norm == 0:
            raise ParseException(
                f"Zero embedding vector for '{item_id}'", filename, lineno
            )
        if abs(norm - 1.0) > NORM_TOLERANCE:
            vector = vector / norm
            normalized.append(item_id)
        vectors[item_id] = vector

    if normalized:
        logger.warning(
            f"Normalized {len(normalized)} embedding(s) to unit length in '{filename}'"
        )
    return ItemEmbeddings(vectors, tuple(normalized))


def load_embeddings(filename: Path | str) -> ItemEmbeddings:
    path = Path(filename)
    return parse_embeddings(path.read_text(encoding="utf-8"), str(path))
