import json
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hqds.algebra import StructureTensor
from hqds.catalog import CATALOG
from hqds.classifier import classify
from hqds.io import (
    AlgebraDocument,
    DocumentError,
    classification_report,
    dumps,
    format_rational,
    format_report_text,
    parse_rational,
)

rat = st.fractions(min_value=-50, max_value=50, max_denominator=30)
vec = st.tuples(rat, rat, rat)
tensors = st.tuples(vec, vec, vec, vec, vec, vec).map(StructureTensor)


def test_rational_strings():
    assert format_rational(F(-6, 4)) == "-3/2"
    assert format_rational(F(5)) == "5/1"
    assert parse_rational("-3/2") == F(-3, 2)
    assert parse_rational(" 4 ") == 4
    assert parse_rational("6/4") == F(3, 2)
    for bad in ("1/0", "0.5", "x", 0.5, "1/-2", True):
        with pytest.raises(DocumentError):
            parse_rational(bad)


@given(rat)
def test_rational_round_trip(x):
    assert parse_rational(format_rational(x)) == x


@given(tensors)
def test_document_round_trip(t):
    doc = AlgebraDocument(t, {"name": "x"})
    back = AlgebraDocument.loads(doc.dumps())
    assert back.tensor == t and back.metadata == {"name": "x"}


def test_catalog_documents_round_trip():
    for e in CATALOG:
        for s in e.samples:
            t = e.tensor(s)
            assert AlgebraDocument.loads(AlgebraDocument(t).dumps()).tensor == t


def _doc_dict():
    return AlgebraDocument(CATALOG[0].tensor(())).to_dict()


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("format_version"),
        lambda d: d["products"].pop("12"),
        lambda d: d["products"].update({"21": ["0/1", "0/1", "0/1"]}),
        lambda d: d["products"].update({"11": ["0/1", "0/1"]}),
        lambda d: d["products"].update({"11": ["0/1", "0/1", "1/0"]}),
        lambda d: d.update({"metadata": []}),
        lambda d: d.pop("products"),
    ],
)
def test_malformed_documents(mutate):
    d = _doc_dict()
    mutate(d)
    with pytest.raises(DocumentError):
        AlgebraDocument.from_dict(d)


def test_invalid_json_and_missing_file(tmp_path):
    with pytest.raises(DocumentError):
        AlgebraDocument.loads("{nope")
    with pytest.raises(DocumentError):
        AlgebraDocument.loads("[]")
    with pytest.raises(DocumentError):
        AlgebraDocument.load(tmp_path / "absent.json")


def test_report_is_deterministic():
    t = CATALOG[9].tensor(())
    a = dumps(classification_report(t, classify(t)))
    b = dumps(classification_report(t, classify(t)))
    assert a == b
    rep = json.loads(a)
    assert rep["family"]["label"] == "A10" and rep["invariants"]["dim_der"] == 6
    assert "verdict: family" in format_report_text(rep)


def test_report_carries_discrepancies():
    t = CATALOG[4].tensor((F(2),))
    rep = classification_report(t, classify(t))
    assert rep["discrepancies"] and "A5" in rep["discrepancies"][0]
    assert "reference discrepancies:" in format_report_text(rep)
