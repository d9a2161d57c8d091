import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import numpy as np

from ..domain import MOEvalException
from ..tradeoff import CurveFamily, TradeoffCurve
from .config import ConfigException


def _bound(value: Any, default: float) -> float:
    return default if value is None else float(value)


def parse_curve_report(
    text: str, filename: str = "<curves>"
) -> dict[str, TradeoffCurve]:
    """Read back the curves written by `moeval fit`, keyed by auxiliary metric id."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigException(f"{filename}: invalid JSON: {err}") from None
    curves_doc = doc.get("curves") if isinstance(doc, Mapping) else None
    if not isinstance(curves_doc, Mapping) or not curves_doc:
        raise ConfigException(f"{filename}: no 'curves' object")

    curves = {}
    try:
        for aux_id, entry in curves_doc.items():
            curves[aux_id] = TradeoffCurve(
                base_id=str(entry["base_id"]),
                aux_id=str(entry["aux_id"]),
                slope=float(entry["slope"]),
                intercept=float(entry["intercept"]),
                n_front_points=int(entry["n_front_points"]),
                r_squared=float(entry["r_squared"]),
                family=CurveFamily(entry.get("family", "linear")),
                aux_min=_bound(entry.get("aux_min"), -np.inf),
                aux_max=_bound(entry.get("aux_max"), np.inf),
                fitted=bool(entry.get("fitted", True)),
            )
            if curves[aux_id].aux_id != aux_id:
                raise ConfigException(
                    f"Curve keyed '{aux_id}' describes '{curves[aux_id].aux_id}'"
                )
    except MOEvalException as err:
        raise ConfigException(f"{filename}: {err.msg}") from None
    except (KeyError, TypeError, ValueError) as err:
        raise ConfigException(f"{filename}: malformed curve: {err}") from None
    return curves


def load_curve_report(filename: Path | str) -> dict[str, TradeoffCurve]:
    path = Path(filename)
    return parse_curve_report(path.read_text(encoding="utf-8"), str(path))
