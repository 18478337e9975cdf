"""Exact rational scalars, small dense matrices and univariate polynomials.

Matrices are tuples of row tuples of :class:`fractions.Fraction`; vectors are
tuples of fractions.  Everything here is a pure function on immutable values.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Vector = tuple  # tuple[Fraction, ...]
Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


class NotRational(ArithmeticError):
    """Eigen-data of a rational matrix does not live over the rationals."""


class SingularMatrixError(ArithmeticError):
    pass


def q(x) -> Fraction:
    """Coerce ints, strings like ``"-3/4"`` and fractions to ``Fraction``.

    Floats are rejected: exact paths must never see them.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (np.integer,)):
        return Fraction(int(x))
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def matrix(rows: Iterable[Iterable]) -> Matrix:
    return tuple(tuple(q(x) for x in row) for row in rows)


def vector(xs: Iterable) -> Vector:
    return tuple(q(x) for x in xs)


def identity(n: int = 3) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def zeros(rows: int = 3, cols: int = 3) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(cols)) for _ in range(rows))


def diag(*xs) -> Matrix:
    n = len(xs)
    return tuple(tuple(q(xs[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def from_columns(cols: Sequence[Vector]) -> Matrix:
    return tuple(tuple(c[i] for c in cols) for i in range(len(cols[0])))


def column(m: Matrix, j: int) -> Vector:
    return tuple(row[j] for row in m)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Matrix, v: Vector) -> Vector:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def mat_scale(c, a: Matrix) -> Matrix:
    c = q(c)
    return tuple(tuple(c * x for x in r) for r in a)


def is_zero_matrix(a: Matrix) -> bool:
    return all(x == 0 for r in a for x in r)


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(c, u: Vector) -> Vector:
    c = q(c)
    return tuple(c * x for x in u)


def rref(m: Sequence[Sequence[Fraction]], cols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with first-nonzero pivoting in scan order.

    Elimination runs on integer rows (each row cleared of denominators and
    divided by its content), which is much faster than Fraction arithmetic.
    """
    ncols = cols if cols is not None else (len(m[0]) if m else 0)
    a = [_integer_row(r) for r in m]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        prow = a[r]
        pv = prow[c]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = _primitive([pv * x - f * y for x, y in zip(a[i], prow)])
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    out = []
    for i, row in enumerate(a):
        if i < len(pivots):
            pv = row[pivots[i]]
            out.append([Fraction(x, pv) for x in row])
        else:
            out.append([Fraction(x) for x in row])
    return out, pivots


def _integer_row(row: Sequence) -> list[int]:
    fr = [Fraction(x) for x in row]
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return _primitive([x.numerator * (den // x.denominator) for x in fr])


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = math.gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def rank(m: Sequence[Sequence[Fraction]]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def kernel_basis(m: Sequence[Sequence], rows: int | None = None, cols: int | None = None) -> list[Vector]:
    """Basis of the right nullspace, one vector per free column.

    Each vector carries a 1 in its free column and zeros in the other free
    columns, so the result is reproducible for identical input.
    """
    a = [[q(x) for x in r] for r in m]
    if rows is not None and len(a) != rows:
        raise ValueError(f"expected {rows} rows, got {len(a)}")
    ncols = cols if cols is not None else (len(a[0]) if a else 0)
    if not a:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    red, pivots = rref(a, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return basis


def det(m: Matrix) -> Fraction:
    a = [list(r) for r in m]
    n = len(a)
    d = Fraction(1)
    for c in range(n):
        pr = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pr is None:
            return Fraction(0)
        if pr != c:
            a[c], a[pr] = a[pr], a[c]
            d = -d
        pv = a[c][c]
        d *= pv
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / pv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    red, pivots = rref(aug, n)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return tuple(tuple(r[n:]) for r in red)


def solve(m: Matrix, b: Vector) -> Vector:
    return matvec(inverse(m), b)


def complete_basis(vectors: Sequence[Vector], n: int = 3) -> list[Vector]:
    """Extend independent vectors to a basis with standard vectors (scan order)."""
    out = list(vectors)
    for i in range(n):
        if len(out) == n:
            break
        e = tuple(Fraction(int(i == j)) for j in range(n))
        if rank(out + [e]) == len(out) + 1:
            out.append(e)
    return out


def mat_power(m: Matrix, k: int) -> Matrix:
    out = identity(len(m))
    for _ in range(k):
        out = matmul(out, m)
    return out


def trace(m: Matrix) -> Fraction:
    return sum((m[i][i] for i in range(len(m))), Fraction(0))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Univariate polynomial with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [q(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c=1) -> "Polynomial":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lc = self.lead()
        return Polynomial(c / lc for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(q(other) * c for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lc = other.lead()
        dd = other.degree
        while len(rem) - 1 >= dd and rem:
            k = len(rem) - 1 - dd
            f = rem[-1] / lc
            quo[k] = f
            for i, c in enumerate(other.coeffs):
                rem[i + k] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Polynomial(quo), Polynomial(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def evaluate_matrix(self, m: Matrix) -> Matrix:
        n = len(m)
        acc = zeros(n, n)
        for c in reversed(self.coeffs):
            acc = mat_add(matmul(acc, m), mat_scale(c, identity(n)))
        return acc

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            else:
                body = fmt(mag) + ("*" + mono if mono else "")
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def characteristic_polynomial(m: Matrix) -> Polynomial:
    """det(t I - m) for a 3x3 (or smaller) matrix, via Faddeev-LeVerrier."""
    return _charpoly(tuple(tuple(q(x) for x in r) for r in m))


@functools.lru_cache(maxsize=4096)
def _charpoly(m: Matrix) -> Polynomial:
    n = len(m)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = zeros(n, n)
    c = Fraction(1)
    for k in range(1, n + 1):
        mk = matmul(m, mat_add(mk, mat_scale(c, identity(n))))
        c = -trace(mk) / k
        coeffs[n - k] = c
    return Polynomial(coeffs)


def minimal_polynomial(m: Matrix) -> Polynomial:
    """Monic annihilating polynomial of least degree.

    Scans I, m, m^2, ... for the first linear dependency.
    """
    n = len(m)
    powers = [identity(n)]
    for d in range(1, n + 1):
        powers.append(matmul(powers[-1], m))
        # columns: flattened powers 0..d-1; solve sum c_k m^k = -m^d
        flat = [tuple(x for r in p for x in r) for p in powers[:d]]
        target = tuple(x for r in powers[d] for x in r)
        aug = [list(col) for col in zip(*flat, target)]  # rows: n*n equations
        red, piv = rref(aug, d + 1)
        if d in piv:
            continue  # inconsistent: no dependency of degree d
        sol = [Fraction(0)] * d
        for row, pc in zip(red, piv):
            sol[pc] = row[d]
        return Polynomial([-s for s in sol] + [1])
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


def is_squarefree(p: Polynomial) -> bool:
    if p.is_zero():
        raise ValueError("zero polynomial has no squarefree test")
    return poly_gcd(p, p.derivative()).degree == 0


def _integer_coeffs(p: Polynomial) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    return [x // g for x in ints] if g else ints


def _is_square(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


def rational_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None when irrational."""
    return _is_square(q(x))


def rational_roots(p: Polynomial) -> list[Fraction]:
    """Distinct rational roots, ascending.

    Degrees up to 2 are solved in closed form.  Higher degrees take candidate
    roots from a floating-point solve and keep only those that annihilate the
    polynomial exactly, so a returned root is always a true root.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    roots: list[Fraction] = []
    cur = p
    while cur.degree >= 1 and cur.coeffs[0] == 0:
        roots.append(Fraction(0))
        cur = Polynomial(cur.coeffs[1:])
    while cur.degree > 2:
        found = _find_one_rational_root(cur)
        if found is None:
            break
        roots.append(found)
        cur = cur // Polynomial([-found, 1])
    if cur.degree == 1:
        roots.append(-cur.coeffs[0] / cur.coeffs[1])
    elif cur.degree == 2:
        c, b, a = cur.coeffs
        s = _is_square(b * b - 4 * a * c)
        if s is not None:
            roots += [(-b - s) / (2 * a), (-b + s) / (2 * a)]
    return sorted(set(roots))


def _find_one_rational_root(p: Polynomial) -> Fraction | None:
    ints = _integer_coeffs(p)
    lead = abs(ints[-1])
    approx = np.roots([float(c) for c in reversed(ints)])
    for z in approx:
        if abs(z.imag) > 1e-6 * max(1.0, abs(z.real)):
            continue
        r = float(z.real)
        cands = {Fraction(r).limit_denominator(b) for b in (1, 10, 1000, 10**6, 10**9)}
        if lead < 10**6:
            for dq in _divisors(lead):
                cands.add(Fraction(round(r * dq), dq))
        for c in sorted(cands):
            if p(c) == 0:
                return c
    return None


def _divisors(n: int) -> list[int]:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i * i != n:
                out.append(n // i)
        i += 1
    return sorted(out)


def root_multiplicity(p: Polynomial, r: Fraction) -> int:
    k = 0
    lin = Polynomial([-r, 1])
    cur = p
    while not cur.is_zero():
        quo, rem = cur.divmod(lin)
        if not rem.is_zero():
            break
        k += 1
        cur = quo
    return k


# ---------------------------------------------------------------------------
# eigen-data
# ---------------------------------------------------------------------------

def rational_eigen_decomposition(m: Matrix) -> list[tuple[Fraction, int, list[Vector]]]:
    """Eigenvalues with algebraic multiplicity and an eigenspace basis each.

    Raises NotRational unless the characteristic polynomial splits over Q.
    Output is ordered by eigenvalue.
    """
    chi = characteristic_polynomial(m)
    roots = rational_roots(chi)
    mults = [root_multiplicity(chi, r) for r in roots]
    if sum(mults) != chi.degree:
        raise NotRational(f"characteristic polynomial {chi!r} does not split over Q")
    n = len(m)
    out = []
    for r, k in zip(roots, mults):
        shifted = mat_sub(m, mat_scale(r, identity(n)))
        out.append((r, k, kernel_basis(shifted, cols=n)))
    return out


def semisimple_part(m: Matrix) -> Matrix:
    """Semisimple part of the Jordan-Chevalley decomposition of a 3x3 matrix.

    A repeated eigenvalue of a rational 3x3 matrix is necessarily rational,
    which keeps the computation exact.
    """
    chi = characteristic_polynomial(m)
    g = poly_gcd(chi, chi.derivative())
    if g.degree == 0 or is_squarefree(minimal_polynomial(m)):
        return m
    mu = rational_roots(g)[0]
    k = root_multiplicity(chi, mu)
    n = len(m)
    shifted = mat_sub(m, mat_scale(mu, identity(n)))
    sk = mat_power(shifted, k)
    gen = kernel_basis(sk, cols=n)
    img_cols = [column(sk, j) for j in range(n)]
    red, piv = rref(transpose(from_columns(img_cols)) if img_cols else [], n)
    comp = [tuple(r) for r in red[: len(piv)]]
    basis = from_columns(gen + comp)
    proj = matmul(matmul(basis, diag(*([1] * len(gen) + [0] * len(comp)))), inverse(basis))
    nil = matmul(shifted, proj)
    return mat_sub(m, nil)


def to_float(m) -> np.ndarray:
    return np.array([[float(x) for x in r] for r in m], dtype=float)


def vec_to_float(v) -> np.ndarray:
    return np.array([float(x) for x in v], dtype=float)
