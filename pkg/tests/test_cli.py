import io
import json
from fractions import Fraction

import pytest

from hqds.algebra import StructureTensor
from hqds.catalog import entry, table_t6
from hqds.cli import main, seeded_matrix
from hqds.classifier import classify, is_isomorphism
from hqds.io import AlgebraDocument
from hqds.numeric import det, identity


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def docs(tmp_path):
    def make(family, params="", seed=None):
        code, text = run("emit", "--family", str(family), *(["--params", params] if params else []))
        assert code == 0
        path = tmp_path / f"a{family}_{params.replace('/', '_').replace(',', '_')}.json"
        path.write_text(text)
        if seed is not None:
            code, text = run("conjugate", str(path), "--seed", str(seed))
            assert code == 0
            path = tmp_path / f"c{family}_{seed}.json"
            path.write_text(text)
        return path

    return make


def test_classify_canonical_a10(docs, tmp_path):
    out_json = tmp_path / "r.json"
    code, text = run("classify", str(docs(10)), "--json-out", str(out_json))
    assert code == 0
    assert "family: A10" in text and "dim Der = 6" in text
    rep = json.loads(out_json.read_text())
    assert rep["family"]["label"] == "A10" and rep["invariants"]["dim_der"] == 6


def test_classify_zero_document(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(AlgebraDocument(StructureTensor.zero()).dumps())
    code, text = run("classify", str(path))
    assert code == 0 and "verdict: NullAlgebra" in text


def test_conjugated_a8_reports_witness(docs, tmp_path):
    path = docs(8, seed=5)
    out_json = tmp_path / "r.json"
    code, text = run("classify", str(path), "--json-out", str(out_json))
    assert code == 0 and "family: A8" in text and "witness" in text
    rep = json.loads(out_json.read_text())
    doc = AlgebraDocument.load(path)
    w = tuple(tuple(Fraction(x) for x in row) for row in rep["witness"])
    assert is_isomorphism(doc.tensor, entry(8).tensor(()), w)


def test_seeded_conjugations():
    assert seeded_matrix(0) == identity(3)
    m = seeded_matrix(2)
    assert m == seeded_matrix(2) and det(m) != 0
    assert all(-3 <= x <= 3 for row in m for x in row)


def test_conjugate_seed_zero_keeps_tensor(docs):
    path = docs(1)
    code, text = run("conjugate", str(path), "--seed", "0")
    assert code == 0
    assert AlgebraDocument.loads(text).tensor == AlgebraDocument.load(path).tensor


def test_conjugate_round_trips(docs):
    for family, params, seed in ((1, "", 1), (23, "1,2", 2)):
        path = docs(family, params, seed)
        r = classify(AlgebraDocument.load(path).tensor)
        assert r.label.name == f"A{family}"
        if params:
            assert [str(p) for p in r.label.params] == params.split(",")


def test_emit_system():
    code, text = run("emit", "--family", "23", "--params", "1,2", "--system")
    assert code == 0
    assert text.splitlines() == ["dx1/dt = 2*x1*x3 + 4*x2*x3", "dx2/dt = -4*x1*x3 + 2*x2*x3", "dx3/dt = x3^2"]


def test_emit_document_a8():
    code, text = run("emit", "--family", "8")
    doc = AlgebraDocument.loads(text)
    assert code == 0 and doc.tensor == entry(8).tensor(()) and doc.metadata["expected_family"] == "A8"


@pytest.mark.parametrize(
    "argv",
    [
        ("emit", "--family", "18", "--params", "1/2"),
        ("emit", "--family", "40"),
        ("emit", "--family", "4", "--params", "x"),
        ("classify", "/nonexistent/doc.json"),
        ("frobnicate",),
    ],
)
def test_parse_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_not_classifiable_exit_codes(tmp_path):
    outside = tmp_path / "t6.json"
    outside.write_text(AlgebraDocument(table_t6(1, 0)).dumps())
    code, text = run("classify", str(outside))
    assert code == 3 and "outside catalog" in text
    irrational = tmp_path / "irr.json"
    irrational.write_text(AlgebraDocument(
        StructureTensor.from_products({"13": (1, 2, 0), "23": (1, 1, 0), "33": (0, 0, 1)})).dumps())
    assert run("classify", str(irrational))[0] == 4
    code, text = run("classify", str(irrational), "--mode", "float")
    assert code == 0 and "A14" in text


def test_derivations_command(docs):
    code, text = run("derivations", str(docs(10)))
    assert code == 0 and text.startswith("dim Der = 6") and text.count("D") >= 7


def test_invariants_command(docs):
    code, text = run("invariants", str(docs(8)))
    assert code == 0 and "dim Ann = 2" in text and "(0, 0, 1)" in text


def test_simulate_ray(docs, tmp_path):
    export = tmp_path / "traj.csv"
    out_json = tmp_path / "sim.json"
    code, text = run("simulate", str(docs(8)), "--x0", "0,0,1", "--dt", "1e-4", "--checks",
                     "ray,planarity,equilibrium,invariant-set", "--export", str(export), "--json-out", str(out_json))
    assert code == 0
    res = json.loads(out_json.read_text())
    assert res["checks"]["ray"]["max_relative_error"] < 1e-6
    assert res["checks"]["planarity"]["statistic"] < 1e-8
    assert export.read_text().startswith("t,x1,x2,x3\n")


def test_simulate_rejects_unknown_check(docs):
    assert run("simulate", str(docs(8)), "--x0", "0,0,1", "--checks", "magic")[0] == 2
    assert run("simulate", str(docs(8)), "--x0", "0,1")[0] == 2


def test_catalog_command(tmp_path):
    out_json = tmp_path / "cat.json"
    code, text = run("catalog", "--json-out", str(out_json))
    assert code == 0 and text.strip().endswith("35 families")
    assert len(json.loads(out_json.read_text())) == 35


def test_json_output_is_byte_identical(docs, tmp_path):
    path = docs(23, "1,2", 2)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("classify", str(path), "--json-out", str(a))
    run("classify", str(path), "--json-out", str(b))
    assert a.read_bytes() == b.read_bytes()
