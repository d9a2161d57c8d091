import logging

import numpy as np
import pytest

from moeval.parsers import ParseException, parse_embeddings


def test_unit_vectors_kept_as_given():
    embeddings = parse_embeddings("item_id,d0,d1\ni1,1,0\ni2,0.6,0.8\n")
    assert embeddings.dimension == 2
    assert embeddings.normalized_items == ()
    np.testing.assert_allclose(embeddings["i2"], [0.6, 0.8])


def test_off_norm_vectors_are_normalized(caplog):
    with caplog.at_level(logging.WARNING, logger="moeval"):
        embeddings = parse_embeddings("item_id,d0,d1\ni1,3,4\ni2,0,1\n")
    assert embeddings.normalized_items == ("i1",)
    np.testing.assert_allclose(embeddings["i1"], [0.6, 0.8])
    assert "Normalized 1 embedding(s)" in caplog.text


@pytest.mark.parametrize(
    "text, match",
    [
        ("item_id,d0\ni1,1\n", "at least two"),
        ("item_id,d1,d0\ni1,1,0\n", "item_id,d0,d1"),
        ("item_id,d0,d1\ni1,1,0\ni1,0,1\n", "Duplicate embedding for 'i1'"),
        ("item_id,d0,d1\ni1,0,0\n", "Zero embedding vector"),
        ("item_id,d0,d1\ni1,1,x\n", "Non-numeric value 'x'"),
        ("item_id,d0,d1\ni1,inf,0\n", "Non-finite"),
    ],
)
def test_parse_errors(text, match):
    with pytest.raises(ParseException, match=match):
        parse_embeddings(text)
