"""The 35 canonical families: multiplication tables, parameter ranges,
expected invariants and the reference quadratic systems."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import StructureTensor
from .numeric import q

HALF = Fraction(1, 2)


class ParamOutOfRange(ValueError):
    pass


# ---------------------------------------------------------------------------
# multiplication tables
# ---------------------------------------------------------------------------

def table_t1(alpha, beta) -> StructureTensor:
    return StructureTensor.from_products({"12": (0, 0, 1), "33": (0, 0, 1), "13": (alpha, 0, 0), "23": (0, beta, 0)})


def table_t2(alpha, beta) -> StructureTensor:
    return StructureTensor.from_products({"33": (0, 0, 1), "13": (alpha, 0, 0), "23": (0, beta, 0)})


def table_t3(alpha, beta) -> StructureTensor:
    return StructureTensor.from_products({"12": (0, 0, 1), "13": (alpha, 0, 0), "23": (0, beta, 0)})


def table_t4(alpha, beta) -> StructureTensor:
    return StructureTensor.from_products({"13": (alpha, 0, 0), "23": (0, beta, 0)})


def table_i12() -> StructureTensor:
    return StructureTensor.from_products({"33": (0, 0, 1), "23": (1, 0, 0)})


def table_t5(a, b) -> StructureTensor:
    a, b = q(a), q(b)
    return StructureTensor.from_products({"33": (0, 0, 1), "13": (a, -b, 0), "23": (b, a, 0)})


def table_t6(alpha, beta) -> StructureTensor:
    return StructureTensor.from_products({"22": (1, 0, 0), "33": (0, 0, 1), "13": (alpha, 0, 0), "23": (0, beta, 0)})


def table_t7(alpha, beta) -> StructureTensor:
    return StructureTensor.from_products({"11": (0, 1, 0), "13": (alpha, 0, 0), "23": (0, beta, 0)})


def nilpotent_pair() -> StructureTensor:
    """e2 e3 = e1, all else zero (the T3(0,0) algebra, relabelled)."""
    return StructureTensor.from_products({"23": (1, 0, 0)})


TABLES = {
    "T1": table_t1,
    "T2": table_t2,
    "T3": table_t3,
    "T4": table_t4,
    "T6": table_t6,
    "T7": table_t7,
}


# ---------------------------------------------------------------------------
# reference systems as text
# ---------------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def parse_system_component(text: str, env: dict) -> dict:
    """Parse ``"2*alpha*x1*x3 + x2^2"`` into {exponent tuple: coefficient}."""
    out: dict = {}
    text = text.strip()
    if text in ("", "0"):
        return out
    for sign, body in _TERM.findall(text):
        coef = Fraction(-1 if sign == "-" else 1)
        expo = [0, 0, 0]
        for factor in body.strip().split("*"):
            factor = factor.strip()
            m = re.fullmatch(r"x([123])(?:\^(\d+))?", factor)
            if m:
                expo[int(m.group(1)) - 1] += int(m.group(2) or 1)
            elif re.fullmatch(r"\d+(/\d+)?", factor):
                coef *= Fraction(factor)
            elif factor in env:
                coef *= q(env[factor])
            else:
                raise ValueError(f"unknown factor {factor!r} in {text!r}")
        key = tuple(expo)
        out[key] = out.get(key, Fraction(0)) + coef
    return {k: v for k, v in out.items() if v != 0}


def system_of(t: StructureTensor) -> list[dict]:
    """Right-hand side of dx/dt = x.x as three {exponents: coefficient} maps."""
    comps: list[dict] = [{}, {}, {}]
    for i in range(3):
        for j in range(i, 3):
            expo = [0, 0, 0]
            expo[i] += 1
            expo[j] += 1
            mult = 1 if i == j else 2
            for k, c in enumerate(t.product(i, j)):
                if c:
                    comps[k][tuple(expo)] = comps[k].get(tuple(expo), Fraction(0)) + mult * c
    return [{k: v for k, v in c.items() if v != 0} for c in comps]


def format_component(poly: dict) -> str:
    if not poly:
        return "0"
    parts = []
    for expo in sorted(poly, reverse=True):
        c = poly[expo]
        mono = "*".join(
            f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(expo) if e
        )
        mag = abs(c)
        body = mono if mag == 1 else f"{mag}*{mono}"
        parts.append(("-" if c < 0 else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def format_system(t: StructureTensor) -> str:
    return "\n".join(f"dx{k + 1}/dt = {format_component(c)}" for k, c in enumerate(system_of(t)))


# ---------------------------------------------------------------------------
# catalog entries
# ---------------------------------------------------------------------------

def _not_special(x, name):
    if x in (0, HALF):
        return f"{name} must avoid 0 and 1/2"
    return None


def _ratio_rep(beta):
    # representative of {beta, 1/beta}: |beta| > 1, or beta = -1
    if beta in (0, 1):
        return "beta must avoid 0 and 1"
    if not (abs(beta) > 1 or beta == -1):
        return "beta must satisfy |beta| > 1 or beta = -1"
    return None


@dataclass(frozen=True)
class CatalogEntry:
    index: int
    table: str
    params: tuple  # parameter names
    builder: Callable
    range_text: str
    validator: Callable
    samples: tuple
    der_dim: int
    ann_dim: int
    square_dim: int
    idempotents: str  # empty, point, line, two lines, plane, curve, point+curve
    ideals: tuple  # representative ideals, each a tuple of basis vectors
    system: tuple  # reference right-hand side as text, one string per component
    system_symbols: dict = field(default_factory=dict)  # printed symbol -> param name
    reference_erratum: str | None = None
    # dimension of the derivation space as displayed in the reference
    # listing, when that display disagrees with the exact computation
    reference_der_dim: int | None = None
    range_note: str | None = None

    @property
    def label(self) -> str:
        return f"A{self.index}"

    def check(self, params) -> tuple:
        params = tuple(q(p) for p in params)
        if len(params) != len(self.params):
            raise ParamOutOfRange(
                f"{self.label} takes {len(self.params)} parameter(s) ({', '.join(self.params) or 'none'}), got {len(params)}"
            )
        msg = self.validator(*params)
        if msg:
            raise ParamOutOfRange(f"{self.label}: {msg}")
        return params

    def tensor(self, params=()) -> StructureTensor:
        return self.builder(*self.check(params))

    def reference_system(self, params=()) -> list[dict]:
        params = self.check(params)
        env = dict(zip(self.params, params))
        for sym, name in self.system_symbols.items():
            env[sym] = env[name]
        return [parse_system_component(c, env) for c in self.system]


E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def _ok(*_):
    return None


def _entries() -> list[CatalogEntry]:
    S = Fraction
    x3sq = "2*x1*x2 + x3^2"
    ent = []

    def add(index, table, params, builder, range_text, validator, samples, der, ann, sq, idem, ideals, system, **kw):
        ent.append(CatalogEntry(index, table, params, builder, range_text, validator, tuple(samples),
                                der, ann, sq, idem, tuple(tuple(i) for i in ideals), tuple(system), **kw))

    add(1, "T1", (), lambda: table_t1(0, 0), "", _ok, [()], 1, 0, 1, "point",
        [(E3,), (E3, E1), (E3, E2), (E3, (1, 1, 0))], ("0", "0", x3sq))
    add(2, "T1", (), lambda: table_t1(0, HALF), "", _ok, [()], 1, 0, 2, "line",
        [(E2, E3)], ("0", "x2*x3", x3sq))
    add(3, "T1", (), lambda: table_t1(HALF, HALF), "", _ok, [()], 1, 0, 3, "two lines",
        [], ("x1*x3", "x2*x3", x3sq))
    add(4, "T1", ("alpha",), lambda a: table_t1(a, 0), "alpha not in {0, 1/2}",
        lambda a: _not_special(a, "alpha"),
        [(S(-1),), (S(1),), (S(2),), (S(-3, 4),), (S(5, 3),)], 1, 0, 2, "point",
        [(E1, E3)], ("2*alpha*x1*x3", "0", x3sq))
    add(5, "T1", ("alpha",), lambda a: table_t1(a, HALF), "alpha not in {0, 1/2}",
        lambda a: _not_special(a, "alpha"),
        [(S(-1),), (S(1),), (S(2),), (S(1, 3),), (S(-5, 2),)], 1, 0, 3, "line",
        [], ("2*alpha*x1*x3", "x2*x3", "2*x1*x3 + x3^2"),
        reference_erratum="third component prints 2*x1*x3 where the table gives 2*x1*x2")
    add(6, "T1", ("alpha",), lambda a: table_t1(a, a), "alpha not in {0, 1/2}",
        lambda a: _not_special(a, "alpha"),
        [(S(1, 4),), (S(1),), (S(-1),), (S(3),), (S(-2, 7),)], 1, 0, 3, "point+curve",
        [], ("2*alpha*x1*x3", "2*alpha*x2*x3", x3sq))
    add(7, "T1", ("alpha", "beta"), table_t1, "alpha < beta, both not in {0, 1/2}",
        lambda a, b: _not_special(a, "alpha") or _not_special(b, "beta") or (None if a < b else "need alpha < beta"),
        [(S(1), S(2)), (S(-1), S(1)), (S(-3), S(-1, 3)), (S(1, 4), S(3, 4)), (S(-1, 2), S(7, 5))],
        1, 0, 3, "point", [], ("2*alpha*x1*x3", "2*beta*x2*x3", x3sq))
    add(8, "T2", (), lambda: table_t2(0, 0), "", _ok, [()], 4, 2, 1, "point",
        [(E3,), (E1,), (E2,), ((1, 1, 0),), (E1, E2), (E3, E1), (E3, (2, -1, 0))],
        ("0", "0", "x3^2"))
    add(9, "T2", (), lambda: table_t2(0, HALF), "", _ok, [()], 3, 1, 2, "line",
        [(E1,), (E2, E3)], ("0", "x2*x3", "x3^2"))
    add(10, "T2", (), lambda: table_t2(HALF, HALF), "", _ok, [()], 6, 0, 3, "plane",
        [(E1,), (E2,), (E1, E2)], ("x1*x3", "x2*x3", "x3^2"))
    add(11, "T2", ("beta",), lambda b: table_t2(0, b), "beta not in {0, 1/2}",
        lambda b: _not_special(b, "beta"),
        [(S(1),), (S(-1),), (S(2),), (S(3, 4),), (S(-5, 3),)], 2, 1, 2, "point",
        [(E1,), (E2,), (E1, E2), (E2, E3)], ("0", "x2*x3", "x3^2"),
        reference_erratum="second component prints x2*x3 where the table gives 2*beta*x2*x3")
    add(12, "T2", ("beta",), lambda b: table_t2(HALF, b), "beta not in {0, 1/2}",
        lambda b: _not_special(b, "beta"),
        [(S(1),), (S(-1),), (S(2),), (S(1, 3),), (S(-7, 4),)], 3, 0, 3, "line",
        [(E1,), (E2,), (E1, E2)], ("x1*x3", "2*beta*x2*x3", "x3^2"),
        reference_der_dim=2)
    add(13, "T2", ("alpha",), lambda a: table_t2(a, a), "alpha not in {0, 1/2}",
        lambda a: _not_special(a, "alpha"),
        [(S(1),), (S(-1),), (S(3, 4),), (S(2),), (S(-1, 3),)], 4, 0, 3, "point",
        [(E1,), (E2,), (E1, E2)], ("2*alpha*x1*x3", "2*alpha*x2*x3", "x3^2"))
    add(14, "T2", ("alpha", "beta"), table_t2, "alpha < beta, both not in {0, 1/2}",
        lambda a, b: _not_special(a, "alpha") or _not_special(b, "beta") or (None if a < b else "need alpha < beta"),
        [(S(1), S(2)), (S(-1), S(1)), (S(-3), S(-1, 3)), (S(1, 4), S(3, 4)), (S(-1, 2), S(7, 5))],
        2, 0, 3, "point", [(E1,), (E2,), (E1, E2)], ("2*alpha*x1*x3", "2*beta*x2*x3", "x3^2"))
    add(15, "T3", (), nilpotent_pair, "", _ok, [()], 4, 1, 1, "empty",
        [(E1,), (E1, E2), (E1, E3), (E1, (0, 1, 1))], ("2*x2*x3", "0", "0"))
    add(16, "T3", (), lambda: table_t3(0, 1), "", _ok, [()], 1, 0, 2, "empty",
        [(E2, E3)], ("0", "2*x2*x3", "2*x1*x2"))
    add(17, "T3", (), lambda: table_t3(1, 1), "", _ok, [()], 1, 0, 3, "curve",
        [], ("2*x1*x3", "2*x2*x3", "2*x1*x2"))
    add(18, "T3", ("beta",), lambda b: table_t3(1, b), "|beta| > 1 or beta = -1",
        _ratio_rep,
        [(S(2),), (S(-1),), (S(-2),), (S(5, 3),), (S(-7, 2),)], 1, 0, 3, "empty",
        [], ("2*x1*x3", "2*beta*x2*x3", "2*x1*x2"),
        range_note="nominal range beta > 1 is widened to |beta| > 1 or beta = -1")
    add(19, "T4", (), lambda: table_t4(0, 1), "", _ok, [()], 3, 1, 1, "empty",
        [(E1,), (E2,), (E2, E1), (E2, E3), (E2, (1, 0, 1))], ("0", "2*x2*x3", "0"))
    add(20, "T4", (), lambda: table_t4(1, 1), "", _ok, [()], 4, 0, 2, "empty",
        [(E1,), (E2,), (E1, E2)], ("2*x1*x3", "2*x2*x3", "0"))
    add(21, "T4", ("beta",), lambda b: table_t4(1, b), "|beta| > 1 or beta = -1",
        _ratio_rep,
        [(S(2),), (S(-1),), (S(-2),), (S(5, 3),), (S(-7, 2),)], 2, 0, 2, "empty",
        [(E1,), (E2,), (E1, E2)], ("2*x1*x3", "2*beta*x2*x3", "0"),
        range_note="nominal range beta not in {0, 1} is narrowed to |beta| > 1 or beta = -1")
    add(22, "TI12", (), table_i12, "", _ok, [()], 2, 1, 2, "point",
        [(E1,), (E1, E2), (E1, E3)], ("2*x2*x3", "0", "x3^2"))
    add(23, "T5", ("a", "b"), table_t5, "b > 0",
        lambda a, b: None if b > 0 else "b must be positive",
        [(S(1), S(2)), (S(0), S(1)), (S(-1), S(1, 2)), (S(1, 2), S(3)), (S(-2, 3), S(5, 4))],
        2, 0, 3, "point", [(E1, E2)],
        ("2*a*x1*x2 + 2*b*x2*x3", "-2*b*x1*x3 + 2*a*x2*x3", "x3^2"),
        reference_erratum="first component prints 2*a*x1*x2 where the table gives 2*a*x1*x3")
    add(24, "T6", ("beta",), lambda b: table_t6(0, b), "beta not in {0, 1/2}",
        lambda b: _not_special(b, "beta"),
        [(S(1),), (S(-1),), (S(2),), (S(1, 4),), (S(-3, 2),)], 1, 1, 3, "point",
        [(E1,), (E1, E2)], ("x2^2", "2*alpha*x2*x3", "x3^2"), system_symbols={"alpha": "beta"})
    add(25, "T6", (), lambda: table_t6(0, 0), "", _ok, [()], 2, 1, 2, "point",
        [(E1,), (E1, E2), (E1, E3)], ("x2^2", "0", "x3^2"))
    add(26, "T6", (), lambda: table_t6(0, HALF), "", _ok, [()], 2, 1, 3, "curve",
        [(E1,), (E1, E2)], ("x2^2", "x2*x3", "x3^2"))
    add(27, "T6", ("alpha", "beta"), table_t6, "alpha, beta not in {0, 1/2}, alpha != beta",
        lambda a, b: _not_special(a, "alpha") or _not_special(b, "beta") or (None if a != b else "need alpha != beta"),
        [(S(1), S(2)), (S(2), S(1)), (S(-1), S(1)), (S(1, 4), S(-3, 4)), (S(3), S(-1, 3))],
        1, 0, 3, "point", [(E1,), (E1, E2)], ("2*alpha*x1*x3 + x2^2", "2*beta*x2*x3", "x3^2"))
    add(28, "T6", ("alpha",), lambda a: table_t6(a, a), "alpha not in {0, 1/2}",
        lambda a: _not_special(a, "alpha"),
        [(S(1),), (S(-1),), (S(2),), (S(1, 4),), (S(-5, 3),)], 2, 0, 3, "point",
        [(E1,), (E1, E2)], ("2*alpha*x1*x3 + x2^2", "2*alpha*x2*x3", "x3^2"))
    add(29, "T6", ("alpha",), lambda a: table_t6(a, HALF), "alpha not in {0, 1/2}",
        lambda a: _not_special(a, "alpha"),
        [(S(1),), (S(-1),), (S(2),), (S(1, 4),), (S(-5, 3),)], 2, 0, 3, "curve",
        [(E1,), (E1, E2)], ("2*alpha*x1*x3 + x2^2", "x2*x3", "x3^2"))
    add(30, "T6", (), lambda: table_t6(HALF, HALF), "", _ok, [()], 3, 0, 3, "line",
        [(E1,), (E1, E2)], ("x1*x3 + x2^2", "x2*x3", "x3^2"))
    add(31, "T6", ("beta",), lambda b: table_t6(HALF, b), "beta not in {0, 1/2}",
        lambda b: _not_special(b, "beta"),
        [(S(1),), (S(-1),), (S(2),), (S(1, 4),), (S(-5, 3),)], 2, 0, 3, "line",
        [(E1,), (E1, E2)], ("x1*x3 + x2^2", "2*beta*x2*x3", "x3^2"))
    add(32, "T7", (), lambda: table_t7(0, 0), "", _ok, [()], 5, 2, 1, "empty",
        [(E2,), (E3,), ((0, 1, 1),), (E2, E1), (E2, E3), (E2, (1, 0, 1))], ("x1^2", "0", "0"),
        reference_erratum="prints (x1^2, 0, 0) where the table gives (0, x1^2, 0)")
    add(33, "T7", ("beta",), lambda b: table_t7(1, b), "beta not in {0, 1}",
        lambda b: None if b not in (0, 1) else "beta must avoid 0 and 1",
        [(S(2),), (S(-1),), (S(1, 2),), (S(3),), (S(-2, 5),)], 1, 0, 2, "empty",
        [(E2,), (E1, E2)], ("2*x1*x3", "x1^2 + 2*beta*x2*x3", "0"))
    add(34, "T7", (), lambda: table_t7(1, 1), "", _ok, [()], 2, 0, 2, "empty",
        [(E2,), (E1, E2)], ("2*x1*x3", "x1^2 + 2*x2*x3", "0"))
    add(35, "T7", (), lambda: table_t7(1, 0), "", _ok, [()], 2, 1, 2, "empty",
        [(E2,), (E1, E2)], ("2*x1*x3", "x1^2", "0"))
    return ent


CATALOG: tuple[CatalogEntry, ...] = tuple(_entries())


def entry(index: int) -> CatalogEntry:
    if not 1 <= index <= len(CATALOG):
        raise ParamOutOfRange(f"family index must be 1..{len(CATALOG)}, got {index}")
    return CATALOG[index - 1]


def catalog_listing() -> list[dict]:
    out = []
    for e in CATALOG:
        out.append(
            {
                "label": e.label,
                "table": e.table,
                "params": list(e.params),
                "range": e.range_text,
                "dim_der": e.der_dim,
                "dim_ann": e.ann_dim,
                "dim_square": e.square_dim,
                "idempotents": e.idempotents,
                "ideals": [[list(map(int, v)) for v in i] for i in e.ideals],
                "system": list(e.system),
                "reference_erratum": e.reference_erratum,
                "reference_dim_der": e.reference_der_dim,
                "range_note": e.range_note,
            }
        )
    return out
