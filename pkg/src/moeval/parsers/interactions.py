from collections import Counter
from pathlib import Path

from ..bncv import Interaction, InteractionDataset
from ..log import logger
from .table import ParseException, lineno_of, numeric_column, read_table

INTERACTION_KEYS = ("user_id", "item_id", "artist_id", "timestamp")
ATTRIBUTE_PREFIX = "attr_"


def parse_interactions(
    text: str, filename: str = "<interactions>"
) -> InteractionDataset:
    """
    Parse `user_id,item_id,artist_id,timestamp[,attr_*]` rows. Attribute columns are
    collected per user without the prefix; an empty attribute cell is ignored.
    """
    frame = read_table(text, filename, INTERACTION_KEYS)
    extra = [c for c in frame.columns if c not in INTERACTION_KEYS]
    unknown = [c for c in extra if not c.startswith(ATTRIBUTE_PREFIX)]
    if unknown:
        raise ParseException(f"Unexpected columns {unknown}", filename, 1)

    timestamps = numeric_column(frame, "timestamp", filename)
    events = []
    attributes: dict[str, dict[str, str]] = {}
    for row in range(len(frame)):
        lineno = lineno_of(frame, row)
        user_id, item_id, artist_id = (
            frame[c].iloc[row].strip() for c in INTERACTION_KEYS[:3]
        )
        if not (user_id and item_id and artist_id):
            raise ParseException("Empty user, item or artist id", filename, lineno)
        timestamp = float(timestamps.iloc[row])
        if not timestamp.is_integer():
            raise ParseException(
                f"Timestamp {timestamp} is not integer seconds", filename, lineno
            )
        events.append(Interaction(user_id, item_id, artist_id, int(timestamp)))

        user_attrs = attributes.setdefault(user_id, {})
        for column in extra:
            value = frame[column].iloc[row].strip()
            if not value:
                continue
            name = column.removeprefix(ATTRIBUTE_PREFIX)
            if user_attrs.setdefault(name, value) != value:
                raise ParseException(
                    f"Conflicting {name} for user '{user_id}': "
                    f"'{user_attrs[name]}' vs '{value}'",
                    filename,
                    lineno,
                )

    counts = Counter(e.user_id for e in events)
    short = sorted(user for user, n in counts.items() if n < 2)
    if short:
        raise ParseException(f"Users with fewer than 2 events: {short}", filename)

    dataset = InteractionDataset(
        tuple(events), {user: attrs for user, attrs in attributes.items() if attrs}
    )
    logger.info(
        f"Loaded {len(events)} events for {len(counts)} users from '{filename}'"
    )
    return dataset


def load_interactions(filename: Path | str) -> InteractionDataset:
    path = Path(filename)
    return parse_interactions(path.read_text(encoding="utf-8"), str(path))
