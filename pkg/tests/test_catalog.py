from fractions import Fraction as F

import pytest

from hqds.algebra import annihilator, squared_subalgebra
from hqds.catalog import (
    CATALOG,
    ParamOutOfRange,
    catalog_listing,
    entry,
    format_system,
    parse_system_component,
    system_of,
    table_t5,
)
from hqds.derivations import derivation_algebra


def test_catalog_has_35_families():
    assert len(CATALOG) == 35
    assert [e.index for e in CATALOG] == list(range(1, 36))
    assert len(catalog_listing()) == 35


@pytest.mark.parametrize("e", CATALOG, ids=lambda e: e.label)
def test_family_dimensions(e):
    for s in e.samples:
        t = e.tensor(s)
        assert derivation_algebra(t).dimension == e.der_dim
        assert annihilator(t).dim == e.ann_dim
        assert squared_subalgebra(t).dim == e.square_dim


@pytest.mark.parametrize("e", [e for e in CATALOG if not e.reference_erratum], ids=lambda e: e.label)
def test_reference_systems_match(e):
    for s in e.samples:
        assert system_of(e.tensor(s)) == e.reference_system(s)


@pytest.mark.parametrize("e", [e for e in CATALOG if e.reference_erratum], ids=lambda e: e.label)
def test_erratum_systems_differ_somewhere(e):
    assert any(system_of(e.tensor(s)) != e.reference_system(s) for s in e.samples)


def test_flagged_errata():
    assert [e.label for e in CATALOG if e.reference_erratum] == ["A5", "A11", "A23", "A32"]
    assert entry(12).reference_der_dim == 2 and entry(12).der_dim == 3


def test_parameter_ranges():
    with pytest.raises(ParamOutOfRange):
        entry(18).tensor((F(1, 2),))
    with pytest.raises(ParamOutOfRange):
        entry(4).tensor((F(1, 2),))
    with pytest.raises(ParamOutOfRange):
        entry(7).tensor((2, 1))
    with pytest.raises(ParamOutOfRange):
        entry(1).tensor((1,))
    with pytest.raises(ParamOutOfRange):
        entry(36)
    assert entry(18).tensor((-1,)) == entry(18).tensor((F(-1),))


def test_system_text():
    assert parse_system_component("2*alpha*x1*x3 + x2^2", {"alpha": F(1, 2)}) == {(1, 0, 1): 1, (0, 2, 0): 1}
    assert format_system(table_t5(1, 2)).splitlines() == [
        "dx1/dt = 2*x1*x3 + 4*x2*x3",
        "dx2/dt = -4*x1*x3 + 2*x2*x3",
        "dx3/dt = x3^2",
    ]


def test_listing_fields():
    first = catalog_listing()[0]
    assert first["label"] == "A1" and first["dim_der"] == 1
    assert first["system"] == ["0", "0", "2*x1*x2 + x3^2"]
