"""Commutative algebras on R^3 given by structure constants.

The product of basis vectors is e_i e_j = sum_k a_ij^k e_k; the attached
quadratic system is dx/dt = x.x.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .numeric import (
    Matrix,
    Vector,
    column,
    from_columns,
    inverse,
    kernel_basis,
    matvec,
    q,
    rank,
    rref,
    transpose,
    vector,
)

PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
PAIR_KEYS = ("11", "12", "13", "22", "23", "33")
ZERO = Fraction(0)


def _pair_index(i: int, j: int) -> int:
    if i > j:
        i, j = j, i
    return PAIRS.index((i, j))


@dataclass(frozen=True)
class StructureTensor:
    """Six products e_i e_j (i <= j), each a coordinate triple."""

    products: tuple

    def __post_init__(self):
        if len(self.products) != 6:
            raise ValueError("need exactly six pair products")
        prods = tuple(vector(p) for p in self.products)
        for p in prods:
            if len(p) != 3:
                raise ValueError("each product must have three coordinates")
        object.__setattr__(self, "products", prods)

    @classmethod
    def zero(cls) -> "StructureTensor":
        return cls(((0, 0, 0),) * 6)

    @classmethod
    def from_products(cls, table: Mapping[str, Sequence]) -> "StructureTensor":
        """Build from a sparse mapping such as ``{"12": (0, 0, 1), "33": (0, 0, 1)}``.

        Keys may list the pair in either order; missing pairs are zero.
        """
        prods = [(0, 0, 0)] * 6
        for key, val in table.items():
            i, j = int(key[0]) - 1, int(key[1]) - 1
            prods[_pair_index(i, j)] = tuple(val)
        return cls(tuple(prods))

    def product(self, i: int, j: int) -> Vector:
        return self.products[_pair_index(i, j)]

    def const(self, i: int, j: int, k: int) -> Fraction:
        return self.products[_pair_index(i, j)][k]

    def is_zero(self) -> bool:
        return all(x == 0 for p in self.products for x in p)

    def as_array(self) -> np.ndarray:
        """Float array c[i, j, k] with both orders (i, j) filled."""
        a = np.zeros((3, 3, 3))
        for (i, j), p in zip(PAIRS, self.products):
            a[i, j, :] = [float(x) for x in p]
            a[j, i, :] = a[i, j, :]
        return a

    def __repr__(self) -> str:
        nz = []
        for key, p in zip(PAIR_KEYS, self.products):
            if any(p):
                nz.append(f"{key}:({', '.join(str(x) for x in p)})")
        return "StructureTensor(" + ("; ".join(nz) or "null") + ")"


def multiply(t: StructureTensor, u: Sequence, v: Sequence) -> Vector:
    out = [ZERO, ZERO, ZERO]
    for i in range(3):
        if u[i] == 0:
            continue
        for j in range(3):
            if v[j] == 0:
                continue
            c = u[i] * v[j]
            p = t.product(i, j)
            for k in range(3):
                if p[k]:
                    out[k] += c * p[k]
    return tuple(out)


def vector_field(t: StructureTensor, x: Sequence) -> Vector:
    return multiply(t, x, x)


def multiply_float(arr: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("ijk,i,j->k", arr, u, v)


def left_multiplication(t: StructureTensor, u: Sequence) -> Matrix:
    cols = [multiply(t, u, e) for e in _basis()]
    return from_columns(cols)


def _basis() -> list[Vector]:
    return [tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3)]


@dataclass(frozen=True)
class Subspace:
    """Span of linearly independent vectors; dimension 0 to 3."""

    basis: tuple

    def __post_init__(self):
        b = tuple(vector(v) for v in self.basis)
        if b and rank(b) != len(b):
            raise ValueError("subspace basis vectors are dependent")
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, vectors: Iterable[Sequence]) -> "Subspace":
        """Span of arbitrary (possibly dependent) vectors, as an echelon basis."""
        vs = [vector(v) for v in vectors]
        if not vs:
            return cls(())
        red, piv = rref(vs, 3)
        return cls(tuple(tuple(r) for r in red[: len(piv)]))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        v = vector(v)
        if not any(v):
            return True
        if not self.basis:
            return False
        return rank(list(self.basis) + [v]) == len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and all(other.contains(v) for v in self.basis)

    def __hash__(self):
        return hash(self.dim)


def annihilator(t: StructureTensor) -> Subspace:
    # u -> (u e1, u e2, u e3) as a 9x3 matrix
    rows = []
    for j in range(3):
        for k in range(3):
            rows.append([t.const(i, j, k) for i in range(3)])
    return Subspace(tuple(kernel_basis(rows, cols=3)))


def squared_subalgebra(t: StructureTensor) -> Subspace:
    return Subspace.span(t.products)


def is_nilpotent_element(t: StructureTensor, u: Sequence) -> bool:
    u = vector(u)
    return any(u) and not any(multiply(t, u, u))


def is_idempotent_element(t: StructureTensor, u: Sequence) -> bool:
    u = vector(u)
    return any(u) and multiply(t, u, u) == u


def is_subalgebra(t: StructureTensor, s: Subspace) -> bool:
    return all(s.contains(multiply(t, u, v)) for u, v in itertools.combinations_with_replacement(s.basis, 2))


def is_ideal(t: StructureTensor, s: Subspace) -> bool:
    return all(s.contains(multiply(t, e, v)) for e in _basis() for v in s.basis)


def conjugate(t: StructureTensor, s: Matrix) -> StructureTensor:
    """Tensor of the product u o v = S^-1 (S u . S v).

    S maps the new algebra isomorphically onto t.
    """
    s_inv = inverse(s)
    cols = [column(s, i) for i in range(3)]
    prods = [matvec(s_inv, multiply(t, cols[i], cols[j])) for i, j in PAIRS]
    return StructureTensor(tuple(prods))


def change_basis(t: StructureTensor, new_basis: Sequence[Vector]) -> StructureTensor:
    """Structure constants of t in the basis whose vectors are ``new_basis``."""
    return conjugate(t, from_columns(list(new_basis)))


# ---------------------------------------------------------------------------
# adapted constants
# ---------------------------------------------------------------------------

# name -> (i, j, k), zero-based, for the 18 constants of an adapted basis
ADAPTED_LAYOUT = {
    "a": (0, 0, 0), "b": (0, 0, 1), "c": (0, 0, 2),
    "k": (0, 1, 0), "m": (0, 1, 1), "n": (0, 1, 2),
    "d": (1, 1, 0), "e": (1, 1, 1), "f": (1, 1, 2),
    "p": (0, 2, 0), "q": (0, 2, 1), "r": (0, 2, 2),
    "g": (2, 2, 0), "h": (2, 2, 1), "j": (2, 2, 2),
    "s": (1, 2, 0), "t": (1, 2, 1), "v": (1, 2, 2),
}


@dataclass(frozen=True)
class AdaptedConstants:
    a: Fraction = ZERO
    b: Fraction = ZERO
    c: Fraction = ZERO
    k: Fraction = ZERO
    m: Fraction = ZERO
    n: Fraction = ZERO
    d: Fraction = ZERO
    e: Fraction = ZERO
    f: Fraction = ZERO
    p: Fraction = ZERO
    q: Fraction = ZERO
    r: Fraction = ZERO
    g: Fraction = ZERO
    h: Fraction = ZERO
    j: Fraction = ZERO
    s: Fraction = ZERO
    t: Fraction = ZERO
    v: Fraction = ZERO

    def __post_init__(self):
        for fld in fields(self):
            val = getattr(self, fld.name)
            if not isinstance(val, float):
                object.__setattr__(self, fld.name, q(val))

    @classmethod
    def from_tensor(cls, t: StructureTensor) -> "AdaptedConstants":
        return cls(**{name: t.const(i, j, k) for name, (i, j, k) in ADAPTED_LAYOUT.items()})

    def to_tensor(self) -> StructureTensor:
        prods = [[ZERO] * 3 for _ in range(6)]
        for name, (i, j, k) in ADAPTED_LAYOUT.items():
            prods[_pair_index(i, j)][k] = getattr(self, name)
        return StructureTensor(tuple(tuple(p) for p in prods))

    def as_dict(self) -> dict:
        return {fld.name: getattr(self, fld.name) for fld in fields(self)}

    def nonzero(self) -> dict:
        return {k: v for k, v in self.as_dict().items() if v != 0}


# ---------------------------------------------------------------------------
# numeric idempotent search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdempotentHit:
    point: tuple  # floats
    residual: float
    exact: tuple | None  # rational reconstruction verified exactly, if any
    local_dim: int  # nullity of 2 L_u - I at the point


def _reconstruct(x: np.ndarray, max_den: int) -> tuple | None:
    cand = tuple(Fraction(float(c)).limit_denominator(max_den) for c in x)
    if max(abs(float(c) - float(xi)) for c, xi in zip(cand, x)) > 1e-8:
        return None
    return cand


def find_idempotents_numeric(
    t: StructureTensor,
    grid_radius: float = 3,
    tol: float = 1e-10,
    *,
    max_iter: int = 50,
    conv_tol: float = 1e-12,
    dedup: float = 1e-8,
    max_den: int = 10**6,
) -> list[IdempotentHit]:
    """Newton search for u.u = u from the integer grid in [-R, R]^3.

    Singular Jacobians (positive-dimensional idempotent loci) are handled
    with least-squares steps, which land on the locus near the seed.
    """
    if grid_radius <= 0 or tol <= 0:
        raise ValueError("grid_radius and tol must be positive")
    arr = t.as_array()
    r = int(np.floor(grid_radius))
    seeds = [np.array(p, dtype=float) for p in itertools.product(range(-r, r + 1), repeat=3)]
    found: list[IdempotentHit] = []
    eye = np.eye(3)
    for u in seeds:
        for _ in range(max_iter):
            lu = np.einsum("ijk,i->kj", arr, u)
            f = lu @ u - u
            if np.max(np.abs(f)) < conv_tol:
                break
            jac = 2 * lu - eye
            step = np.linalg.lstsq(jac, f, rcond=None)[0]
            u = u - step
            if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > 1e8:
                break
        if not np.all(np.isfinite(u)):
            continue
        lu = np.einsum("ijk,i->kj", arr, u)
        res = float(np.max(np.abs(lu @ u - u)))
        if res >= tol or np.max(np.abs(u)) < 1e-6:
            continue
        if any(np.max(np.abs(np.array(h.point) - u)) < dedup for h in found):
            continue
        sv = np.linalg.svd(2 * lu - eye, compute_uv=False)
        local_dim = int(np.sum(sv < 1e-7 * max(1.0, sv[0])))
        exact = _reconstruct(u, max_den)
        if exact is not None and not is_idempotent_element(t, exact):
            exact = None
        found.append(IdempotentHit(tuple(float(x) for x in u), res, exact, local_dim))
    found.sort(key=lambda h: h.point)
    return found
