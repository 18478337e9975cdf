"""Algebra documents, rational strings and classification reports."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .algebra import PAIR_KEYS, StructureTensor, annihilator, find_idempotents_numeric, squared_subalgebra
from .classifier import ClassificationResult
from .derivations import derivation_algebra
from .numeric import Matrix

FORMAT_VERSION = "1"
_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


class DocumentError(ValueError):
    """Malformed algebra document."""


def format_rational(x: Fraction) -> str:
    """Lowest-terms "p/q" with q > 0 (Fraction normalizes both)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    """Parse "p/q" or an integer "p".  Decimals and floats are rejected."""
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DocumentError(f"rational must be a string like '3/4', got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL.match(text)
    if not m:
        raise DocumentError(f"not a rational string: {text!r}")
    num, den = m.group(1), m.group(2)
    if den is not None and int(den) == 0:
        raise DocumentError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


@dataclass
class AlgebraDocument:
    tensor: StructureTensor
    metadata: dict = field(default_factory=dict)
    format_version: str = FORMAT_VERSION

    def to_dict(self) -> dict:
        out = {
            "format_version": self.format_version,
            "products": {k: [format_rational(x) for x in p] for k, p in zip(PAIR_KEYS, self.tensor.products)},
        }
        if self.metadata:
            out["metadata"] = dict(self.metadata)
        return out

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "AlgebraDocument":
        if not isinstance(data, dict):
            raise DocumentError("document must be a JSON object")
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise DocumentError(f"unsupported format_version {version!r}")
        prods = data.get("products")
        if not isinstance(prods, dict):
            raise DocumentError("missing 'products' object")
        missing = [k for k in PAIR_KEYS if k not in prods]
        extra = sorted(set(prods) - set(PAIR_KEYS))
        if missing or extra:
            raise DocumentError(f"products need exactly the keys {', '.join(PAIR_KEYS)}"
                                + (f"; missing {missing}" if missing else "") + (f"; unexpected {extra}" if extra else ""))
        vals = []
        for k in PAIR_KEYS:
            p = prods[k]
            if not isinstance(p, list) or len(p) != 3:
                raise DocumentError(f"product {k} must be a list of three rationals")
            vals.append(tuple(parse_rational(x) for x in p))
        meta = data.get("metadata", {})
        if not isinstance(meta, dict):
            raise DocumentError("metadata must be an object")
        return cls(StructureTensor(tuple(vals)), meta, version)

    @classmethod
    def loads(cls, text: str) -> "AlgebraDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "AlgebraDocument":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DocumentError(f"cannot read {path}: {exc}") from exc
        return cls.loads(text)


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def matrix_strings(m: Matrix) -> list:
    return [[format_rational(x) for x in row] for row in m]


def _value(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    return float(x)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def invariant_battery(t: StructureTensor, dim_der: int | None = None, grid_radius: int = 2) -> dict:
    if dim_der is None:
        dim_der = derivation_algebra(t).dimension
    hits = find_idempotents_numeric(t, grid_radius=grid_radius)
    return {
        "dim_der": dim_der,
        "dim_ann": annihilator(t).dim,
        "dim_square": squared_subalgebra(t).dim,
        "annihilator_basis": [[format_rational(x) for x in v] for v in annihilator(t).basis],
        "square_basis": [[format_rational(x) for x in v] for v in squared_subalgebra(t).basis],
        "idempotents": {
            "count": len(hits),
            "exact": [[format_rational(x) for x in h.exact] for h in hits if h.exact is not None],
            "local_dims": sorted({h.local_dim for h in hits}),
        },
    }


def classification_report(t: StructureTensor, result: ClassificationResult, grid_radius: int = 2) -> dict:
    """Machine-readable report; identical input gives identical output."""
    rep: dict = {"verdict": result.verdict, "mode": result.mode}
    if result.label is not None:
        rep["family"] = {
            "label": result.label.name,
            "display": str(result.label),
            "table": result.label.table,
            "params": [_value(p) for p in result.label.params],
        }
    if result.spectrum is not None:
        rep["omega"] = _value(result.spectrum.omega)
    if result.witness is not None:
        w = result.witness
        rep["witness"] = matrix_strings(w) if result.mode == "exact" else [[float(x) for x in row] for row in w]
    if result.table is not None:
        rep["table"] = result.table
    if result.reason:
        rep["reason"] = result.reason
    rep["numeric_failure"] = result.numeric_failure
    rep["discrepancies"] = list(result.notes)
    rep["invariants"] = invariant_battery(t, result.dim_der, grid_radius)
    return rep


def short_rational(x) -> str:
    """Display form of a rational string: "3/1" prints as "3"."""
    x = str(x)
    return x[:-2] if x.endswith("/1") else x


MAX_LISTED_IDEMPOTENTS = 8


def format_report_text(rep: dict) -> str:
    lines = [f"verdict: {rep['verdict']}"]
    if "family" in rep:
        fam = rep["family"]
        lines.append(f"family: {fam['display']} (table {fam['table']})")
    if "omega" in rep:
        lines.append(f"omega: {short_rational(rep['omega'])}")
    lines.append(f"mode: {rep['mode']}")
    if "reason" in rep:
        lines.append(f"reason: {rep['reason']}")
    if "witness" in rep:
        lines.append("witness (input coordinates -> canonical coordinates):")
        for row in rep["witness"]:
            lines.append("  [" + ", ".join(short_rational(x) for x in row) + "]")
    inv = rep["invariants"]
    lines.append(f"dim Der = {inv['dim_der']}, dim Ann = {inv['dim_ann']}, dim A^2 = {inv['dim_square']}")
    idem = inv["idempotents"]
    lines.append(f"idempotents found: {idem['count']} (local dims {idem['local_dims']})")
    for p in idem["exact"][:MAX_LISTED_IDEMPOTENTS]:
        lines.append("  (" + ", ".join(short_rational(x) for x in p) + ")")
    if len(idem["exact"]) > MAX_LISTED_IDEMPOTENTS:
        lines.append(f"  ... {len(idem['exact']) - MAX_LISTED_IDEMPOTENTS} more rational points")
    if rep["discrepancies"]:
        lines.append("reference discrepancies:")
        for n in rep["discrepancies"]:
            lines.append(f"  - {n}")
    return "\n".join(lines) + "\n"
