"""Numerical dynamics of dx/dt = x.x: fixed-step RK4 and checks of
equilibria, ray solutions, invariant sets and planarity."""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

import numpy as np

from .algebra import StructureTensor, is_idempotent_element, multiply
from .numeric import kernel_basis, vector

BLOW_UP_NORM = 1e9
SKIP_SPEED = 1e-12


class NonFiniteInput(ValueError):
    pass


class NotIdempotent(ValueError):
    pass


@dataclass(frozen=True)
class BlowUpApproached:
    """Integration stopped because the sup norm exceeded the guard."""

    time: float
    norm: float


@dataclass
class TrajectoryRecord:
    times: list
    states: list
    step: float
    # per-step h * |k4 - k1|_inf, a cheap indicator of how fast the field turns
    diagnostics: list = field(default_factory=list)
    blow_up: BlowUpApproached | None = None

    def as_array(self) -> np.ndarray:
        return np.array(self.states, dtype=float)


class QuadraticField:
    """Float evaluation of (u, v) -> u.v for a fixed tensor."""

    def __init__(self, t: StructureTensor):
        self.arr = t.as_array()
        self.flat = self.arr.reshape(9, 3).T.copy()

    def product(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.flat @ np.outer(u, v).ravel()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.product(x, x)


def _as_point(x0) -> np.ndarray:
    x = np.array([float(c) for c in x0], dtype=float)
    if x.shape != (3,):
        raise ValueError("a point needs three coordinates")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput(f"non-finite point {tuple(x0)}")
    return x


def integrate(t: StructureTensor, x0, t_end: float, dt: float) -> TrajectoryRecord:
    """Classical RK4 from x0 over [0, t_end].

    The step is t_end / ceil(t_end / dt), so the grid is uniform and ends at
    t_end.  Integration halts once |x|_inf exceeds 1e9.
    """
    if not (dt > 0 and t_end > 0) or not (math.isfinite(dt) and math.isfinite(t_end)):
        raise ValueError("dt and t_end must be positive and finite")
    x = _as_point(x0)
    f = QuadraticField(t)
    n = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / n
    times = [0.0]
    states = [tuple(x)]
    diag = []
    for i in range(1, n + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x_new = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        norm = float(np.max(np.abs(x_new))) if np.all(np.isfinite(x_new)) else math.inf
        if norm > BLOW_UP_NORM:
            return TrajectoryRecord(times, states, h, diag, BlowUpApproached(i * h, norm))
        x = x_new
        times.append(i * h)
        states.append(tuple(float(c) for c in x))
        diag.append(h * float(np.max(np.abs(k4 - k1))))
    return TrajectoryRecord(times, states, h, diag)


def check_equilibrium(t: StructureTensor, u):
    """|u.u|_inf; exact for rational points, float otherwise."""
    if any(isinstance(c, float) for c in u):
        x = _as_point(u)
        return float(np.max(np.abs(QuadraticField(t)(x))))
    w = multiply(t, vector(u), vector(u))
    return max(abs(c) for c in w)


def ray_closed_form(c0: float, time: float) -> float:
    return c0 / (1.0 - c0 * time)


def check_ray_solution(
    t: StructureTensor, u, c0: float = 1.0, horizon_fraction: float = 0.9, dt: float = 1e-4
) -> float:
    """Max relative error of the trajectory from c0*u against c0/(1-c0 t) * u.

    Runs to t = horizon_fraction / |c0|; for c0 < 0 the exact solution decays.
    """
    if not 0 < horizon_fraction < 1:
        raise ValueError("horizon_fraction must lie in (0, 1)")
    if c0 == 0:
        raise ValueError("c0 must be nonzero")
    if any(isinstance(c, float) for c in u):
        x = _as_point(u)
        if float(np.max(np.abs(QuadraticField(t)(x) - x))) > 1e-10 or not np.any(x):
            raise NotIdempotent(f"{tuple(u)} is not idempotent")
    elif not is_idempotent_element(t, u):
        raise NotIdempotent(f"{tuple(u)} is not idempotent")
    ufl = _as_point(u)
    rec = integrate(t, c0 * ufl, horizon_fraction / abs(c0), dt)
    worst = 0.0
    for time, state in zip(rec.times, rec.states):
        exact = ray_closed_form(c0, time) * ufl
        err = float(np.linalg.norm(np.array(state) - exact) / np.linalg.norm(exact))
        worst = max(worst, err)
    if rec.blow_up is not None:
        worst = math.inf
    return worst


# ---------------------------------------------------------------------------
# invariant sets
# ---------------------------------------------------------------------------

INVARIANT_KINDS = ("plane", "half-space boundary", "cone", "line", "space")


@dataclass(frozen=True)
class InvariantSetSpec:
    """A set through the origin.

    plane / half-space boundary: coefficients is the normal n, set n.x = 0.
    cone: coefficients is a symmetric 3x3 matrix Q, set x^T Q x = 0.
    line: coefficients is a direction d.
    space: the whole of R^3.
    """

    kind: str
    coefficients: tuple = ()

    def __post_init__(self):
        if self.kind not in INVARIANT_KINDS:
            raise ValueError(f"unknown invariant set kind {self.kind!r}")

    def _coef(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=float)

    def defect(self, x) -> float:
        """Distance-like defect, scaled by max(1, |x|) for planes and lines and
        by |x|^2 for cones."""
        x = np.asarray(x, dtype=float)
        nx = float(np.linalg.norm(x))
        if self.kind == "space":
            return 0.0
        if self.kind in ("plane", "half-space boundary"):
            n = self._coef()
            return abs(float(n @ x)) / float(np.linalg.norm(n)) / max(1.0, nx)
        if self.kind == "line":
            d = self._coef()
            d = d / np.linalg.norm(d)
            return float(np.linalg.norm(x - (x @ d) * d)) / max(1.0, nx)
        if nx == 0:
            return 0.0
        qm = self._coef()
        return abs(float(x @ qm @ x)) / (float(np.linalg.norm(qm, 2)) * nx * nx)

    def contains(self, x, tol: float = 1e-12) -> bool:
        return self.defect(x) <= tol

    def seeds(self, count: int, seed: int = 0) -> list[np.ndarray]:
        """Deterministic points of the set with coordinates in the unit box."""
        rng = np.random.default_rng(seed)
        out: list[np.ndarray] = []
        if self.kind == "space":
            return [rng.uniform(-1, 1, 3) for _ in range(count)]
        if self.kind == "line":
            d = self._coef()
            d = d / np.max(np.abs(d))
            return [rng.uniform(-1, 1) * d for _ in range(count)]
        if self.kind in ("plane", "half-space boundary"):
            b1, b2 = _plane_basis(self._coef())
            while len(out) < count:
                p = rng.uniform(-1, 1) * b1 + rng.uniform(-1, 1) * b2
                m = float(np.max(np.abs(p)))
                if m > 1:
                    p = p / m
                out.append(p)
            return out
        qm = self._coef()
        for _ in range(200 * count):
            if len(out) >= count:
                break
            v, w = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
            # (v + s w)^T Q (v + s w) = 0
            a, b, c = float(w @ qm @ w), 2 * float(v @ qm @ w), float(v @ qm @ v)
            roots = np.roots([a, b, c]) if abs(a) > 1e-14 else ([-c / b] if abs(b) > 1e-14 else [])
            for s in roots:
                if abs(np.imag(s)) < 1e-12:
                    p = v + float(np.real(s)) * w
                    m = float(np.max(np.abs(p)))
                    if m > 1e-9:
                        out.append(p / max(1.0, m))
                        break
        return out[:count]


def _plane_basis(normal: np.ndarray):
    _, _, vt = np.linalg.svd(normal.reshape(1, 3))
    b1, b2 = vt[1], vt[2]
    return b1 / np.max(np.abs(b1)), b2 / np.max(np.abs(b2))


def invariant_set_from_subspace(basis: Sequence[Sequence]) -> InvariantSetSpec:
    """Line or plane spanned by the given vectors (exact normal when rational)."""
    vs = [vector(v) for v in basis]
    if len(vs) == 0 or len(vs) == 3:
        return InvariantSetSpec("space")
    if len(vs) == 1:
        return InvariantSetSpec("line", tuple(float(c) for c in vs[0]))
    normal = kernel_basis(vs, cols=3)
    if len(normal) != 1:
        raise ValueError("plane basis vectors are dependent")
    return InvariantSetSpec("plane", tuple(float(c) for c in normal[0]))


def check_invariant_set(
    t: StructureTensor, s: InvariantSetSpec, samples: int = 8, *, t_end: float = 0.5, dt: float = 1e-3, seed: int = 0
) -> float:
    """Max defect along trajectories started from deterministic points of s."""
    if samples <= 0:
        raise ValueError("samples must be positive")
    if s.kind == "space":
        return 0.0
    worst = 0.0
    for p in s.seeds(samples, seed):
        rec = integrate(t, p, t_end, dt)
        for state in rec.states:
            worst = max(worst, s.defect(state))
    return worst


# ---------------------------------------------------------------------------
# curve geometry
# ---------------------------------------------------------------------------

def _derivatives(f: QuadraticField, x: np.ndarray):
    x1 = f(x)
    x2 = 2 * f.product(x, x1)
    x3 = 2 * f.product(x1, x1) + 2 * f.product(x, x2)
    return x1, x2, x3


def planarity_statistic(t: StructureTensor, x0, t_end: float, dt: float) -> float:
    """max |det[x', x'', x''']| / |x'|^3 along the trajectory from x0."""
    rec = integrate(t, x0, t_end, dt)
    f = QuadraticField(t)
    worst = 0.0
    for state in rec.states:
        d1, d2, d3 = _derivatives(f, np.array(state))
        speed = float(np.linalg.norm(d1))
        if speed < SKIP_SPEED:
            continue
        worst = max(worst, abs(float(np.linalg.det(np.array([d1, d2, d3])))) / speed**3)
    return worst


def collinearity_statistic(t: StructureTensor, x0, t_end: float, dt: float) -> float:
    """max |x' x x''| / (|x'| |x''|); zero along straight trajectories."""
    rec = integrate(t, x0, t_end, dt)
    f = QuadraticField(t)
    worst = 0.0
    for state in rec.states:
        d1, d2, _ = _derivatives(f, np.array(state))
        n1, n2 = float(np.linalg.norm(d1)), float(np.linalg.norm(d2))
        if n1 < SKIP_SPEED or n2 < SKIP_SPEED:
            continue
        worst = max(worst, float(np.linalg.norm(np.cross(d1, d2))) / (n1 * n2))
    return worst


# ---------------------------------------------------------------------------
# sample points and export
# ---------------------------------------------------------------------------

def nilpotent_grid_points(t: StructureTensor, radius: int = 2) -> list[tuple]:
    """Nonzero integer points u in [-radius, radius]^3 with u.u = 0 exactly."""
    out = []
    rng = range(-radius, radius + 1)
    for u in itertools.product(rng, repeat=3):
        if any(u):
            v = tuple(Fraction(c) for c in u)
            if not any(multiply(t, v, v)):
                out.append(v)
    return out


def export_trajectory(rec: TrajectoryRecord, stream: TextIO, delimiter: str = ",") -> None:
    """Write ``t,x1,x2,x3`` lines (with that header) for external plotting."""
    w = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
    w.writerow(["t", "x1", "x2", "x3"])
    for time, state in zip(rec.times, rec.states):
        w.writerow([repr(float(time))] + [repr(float(c)) for c in state])
