import json

import numpy as np
import pytest

from moeval.parsers import ConfigException, parse_curve_report
from moeval.report import emit_curve_report
from moeval.tradeoff import fit_tradeoff, known_tradeoff


def test_curve_report_reads_back():
    fitted = fit_tradeoff(
        [(0.8, 0.1), (0.6, 0.2), (0.4, 0.3), (0.3, 0.1)],
        base_id="hit_rate",
        aux_id="mred",
    )
    known = known_tradeoff("hit_rate", "diversity", -0.5, 0.9)
    curves = parse_curve_report(
        emit_curve_report({"mred": fitted, "diversity": known}, version="1.0")
    )
    assert sorted(curves) == ["diversity", "mred"]

    mred = curves["mred"]
    assert mred.slope == pytest.approx(-2.0)
    assert mred.intercept == pytest.approx(1.0)
    assert (mred.n_front_points, mred.fitted) == (3, True)
    assert (mred.aux_min, mred.aux_max) == (0.1, 0.3)

    diversity = curves["diversity"]
    assert not diversity.fitted
    assert (diversity.aux_min, diversity.aux_max) == (-np.inf, np.inf)


def curve_doc(**overrides) -> str:
    entry = {
        "base_id": "hit_rate",
        "aux_id": "mred",
        "slope": -2.0,
        "intercept": 1.0,
        "n_front_points": 3,
        "r_squared": 1.0,
    }
    entry.update(overrides)
    return json.dumps({"curves": {"mred": entry}})


@pytest.mark.parametrize(
    "text, match",
    [
        ("nope", "invalid JSON"),
        ("{}", "no 'curves' object"),
        (json.dumps({"curves": {}}), "no 'curves' object"),
        (curve_doc(aux_id="div"), "Curve keyed 'mred' describes 'div'"),
        (curve_doc(n_front_points=1), "at least 2 front points"),
        (curve_doc(family="cubic"), "malformed curve"),
        (curve_doc(slope=None), "malformed curve"),
    ],
)
def test_curve_report_errors(text, match):
    with pytest.raises(ConfigException, match=match):
        parse_curve_report(text, "curves.json")
