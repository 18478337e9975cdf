import io
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqds.algebra import is_nilpotent_element
from hqds.catalog import CATALOG, entry, table_t1, table_t2
from hqds.dynamics import (
    InvariantSetSpec,
    NonFiniteInput,
    NotIdempotent,
    check_equilibrium,
    check_invariant_set,
    check_ray_solution,
    collinearity_statistic,
    export_trajectory,
    integrate,
    invariant_set_from_subspace,
    nilpotent_grid_points,
    planarity_statistic,
)

A8 = table_t2(0, 0)
A1 = table_t1(0, 0)
rat = st.fractions(min_value=-2, max_value=2, max_denominator=3)


def test_riccati_closed_form():
    rec = integrate(A8, (0, 0, 1), 0.5, 1e-3)
    assert abs(rec.states[-1][2] - 2.0) < 1e-10
    assert rec.times[-1] == pytest.approx(0.5) and rec.blow_up is None
    assert all(b > a for a, b in zip(rec.times, rec.times[1:]))


def test_origin_and_cone_points_stay_put():
    rec = integrate(A8, (0, 0, 0), 1.0, 0.1)
    assert all(s == (0.0, 0.0, 0.0) for s in rec.states)
    rec = integrate(A1, (1, -0.5, 1), 1.0, 0.01)
    assert rec.states[-1] == (1.0, -0.5, 1.0)


def test_blow_up_guard():
    rec = integrate(A8, (0, 0, 1), 2.0, 1e-3)
    assert rec.blow_up is not None and rec.blow_up.time < 1.01
    assert all(np.all(np.isfinite(s)) for s in rec.states)


def test_integrate_arguments():
    with pytest.raises(NonFiniteInput):
        integrate(A8, (math.nan, 0, 0), 1, 0.1)
    with pytest.raises(ValueError):
        integrate(A8, (0, 0, 1), 1, 0)
    with pytest.raises(ValueError):
        integrate(A8, (0, 0, 1), -1, 0.1)


def test_rk4_order():
    def err(dt):
        rec = integrate(A8, (0, 0, 1), 0.8, dt)
        return abs(rec.states[-1][2] - 1 / (1 - 0.8))

    order = math.log2(err(0.02) / err(0.01))
    assert 3.5 <= order <= 4.5


def test_equilibrium_residuals():
    t = entry(7).tensor((F(-1), F(3)))
    assert check_equilibrium(t, (1, 0, 0)) == 0
    assert check_equilibrium(t, (0, 0, 0)) == 0
    assert check_equilibrium(A1, (0, 0, 1)) == 1
    assert check_equilibrium(A1, (0.0, 0.0, 2.0)) == 4.0


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([e.index for e in CATALOG]), rat, rat, rat)
def test_equilibrium_iff_nilpotent(index, a, b, c):
    e = CATALOG[index - 1]
    t = e.tensor(e.samples[0])
    u = (a, b, c)
    zero = check_equilibrium(t, u) == 0
    assert zero == (is_nilpotent_element(t, u) or not any(u))


def test_nilpotent_grid_points():
    pts = nilpotent_grid_points(A8, 1)
    assert all(p[2] == 0 for p in pts) and len(pts) == 8


def test_ray_solutions():
    assert check_ray_solution(A8, (0, 0, 1), 1.0, 0.9, 1e-4) < 1e-6
    assert check_ray_solution(A8, (0, 0, 1), -1.0, 0.9, 1e-4) < 1e-6
    a6 = entry(6).tensor((F(1, 4),))
    assert check_ray_solution(a6, (1, -1, 2), 1.0, 0.9, 1e-4) < 1e-6
    with pytest.raises(NotIdempotent):
        check_ray_solution(A8, (1, 0, 0))
    with pytest.raises(ValueError):
        check_ray_solution(A8, (0, 0, 1), horizon_fraction=1.5)
    with pytest.raises(ValueError):
        check_ray_solution(A8, (0, 0, 1), c0=0)


def test_invariant_sets():
    cone = InvariantSetSpec("cone", ((0, 1, 0), (1, 0, 0), (0, 0, 1)))
    assert check_invariant_set(A1, cone, 6) < 1e-14  # seeds are equilibria, defect is roundoff
    plane = InvariantSetSpec("plane", (1, 0, 0))
    assert check_invariant_set(entry(9).tensor(()), plane, 6) < 1e-8
    assert check_invariant_set(A1, InvariantSetSpec("space"), 3) == 0.0
    with pytest.raises(ValueError):
        InvariantSetSpec("sphere")
    with pytest.raises(ValueError):
        check_invariant_set(A1, plane, 0)


def test_non_invariant_plane_drifts():
    # x3 = 0 is not invariant for A1: the field has dx3/dt = 2 x1 x2 + x3^2
    assert check_invariant_set(A1, InvariantSetSpec("plane", (0, 0, 1)), 6) > 1e-3


def test_seeds_lie_on_their_sets():
    specs = [
        InvariantSetSpec("cone", ((0, 1, 0), (1, 0, 0), (0, 0, 1))),
        InvariantSetSpec("plane", (1, 2, -1)),
        InvariantSetSpec("line", (1, 1, 0)),
    ]
    for spec in specs:
        pts = spec.seeds(5)
        assert len(pts) == 5
        assert all(spec.contains(p, 1e-12) and np.max(np.abs(p)) <= 1 + 1e-12 for p in pts)


def test_invariant_set_from_subspace():
    assert invariant_set_from_subspace([(1, 0, 0), (0, 1, 0)]).coefficients == (0.0, 0.0, 1.0)
    assert invariant_set_from_subspace([(0, 0, 2)]).kind == "line"


def test_planarity_and_collinearity():
    assert planarity_statistic(A8, (1, 1, 1), 0.5, 1e-3) < 1e-8
    assert planarity_statistic(entry(9).tensor(()), (1, 1, 1), 0.5, 1e-3) < 1e-8
    assert planarity_statistic(A8, (1, 1, 0), 0.5, 1e-3) == 0.0
    assert planarity_statistic(entry(7).tensor((F(-1), F(3))), (1, 1, 1), 0.3, 1e-3) > 1e-3
    assert collinearity_statistic(A8, (1, 1, 1), 0.5, 1e-3) < 1e-12


def test_export_trajectory():
    rec = integrate(A8, (0, 0, 1), 0.2, 0.1)
    buf = io.StringIO()
    export_trajectory(rec, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,x1,x2,x3" and len(lines) == 4
    assert [float(x) for x in lines[1].split(",")] == [0.0, 0.0, 0.0, 1.0]
