"""End-to-end acceptance checks, one test and one summary line per criterion."""
import itertools
import random
import time
from fractions import Fraction as F

import numpy as np

from hqds.algebra import (
    annihilator,
    conjugate,
    find_idempotents_numeric,
    is_idempotent_element,
    is_nilpotent_element,
    squared_subalgebra,
)
from hqds.catalog import CATALOG, system_of, table_t1, table_t2, table_t3, table_t6
from hqds.classifier import classify, emit_canonical
from hqds.derivations import constraint_solution_dimension, derivation_algebra
from hqds.dynamics import (
    check_equilibrium,
    check_invariant_set,
    check_ray_solution,
    invariant_set_from_subspace,
    nilpotent_grid_points,
    planarity_statistic,
)
from hqds.numeric import det, kernel_basis


def _name(e, s):
    return e.label + ("(" + ", ".join(str(x) for x in s) + ")" if s else "")


def _family_samples():
    for e in CATALOG:
        for s in e.samples:
            yield e, tuple(s)


def test_criterion_1_derivation_dimensions(acceptance_report):
    t0 = time.time()
    mismatches = []
    for e, s in _family_samples():
        displayed = e.reference_der_dim if e.reference_der_dim is not None else e.der_dim
        got = derivation_algebra(e.tensor(s)).dimension
        if got != displayed:
            mismatches.append(f"{_name(e, s)}: computed {got}, displayed {displayed}")
    elapsed = time.time() - t0
    anchors = {1: 1, 7: 1, 8: 4, 10: 6, 13: 4, 15: 4, 32: 5, 30: 3}
    anchor_bad = [i for i, d in anchors.items()
                  if derivation_algebra(CATALOG[i - 1].tensor(CATALOG[i - 1].samples[0])).dimension != d]
    ok = not mismatches and not anchor_bad and elapsed < 5
    acceptance_report(1, ok, f"{elapsed:.2f}s; mismatches {mismatches or 'none'}; anchors off {anchor_bad or 'none'}")
    assert ok, mismatches


def _six_line_system(omega):
    """The six constraint lines written out by hand as an 18 x 18 system."""
    names = "a b c k m n d e f p q r g h j s t v".split()
    coeff = {n: F(1) for n in "acefghkmrv"}
    coeff.update({"b": omega - 2, "d": 1 - 2 * omega, "n": 1 + omega, "q": omega - 1, "s": 1 - omega})
    coeff.update({n: F(0) for n in "jpt"})
    rows = []
    for i, n in enumerate(names):
        row = [F(0)] * 18
        row[i] = coeff[n]
        rows.append(row)
    return rows


def test_criterion_2_constraint_dimensions(acceptance_report):
    expected = {F(-1): 4, F(1): 5, F(2): 4, F(3): 3}
    got = {w: constraint_solution_dimension(w) for w in expected}
    brute = {w: len(kernel_basis(_six_line_system(w), cols=18)) for w in expected}
    ok = got == expected and brute == expected
    acceptance_report(2, ok, f"computed {[got[w] for w in expected]}, brute force {[brute[w] for w in expected]}")
    assert ok


def test_criterion_3_round_trip(acceptance_report):
    t0 = time.time()
    bad = []
    n = 0
    for e, s in _family_samples():
        r = classify(emit_canonical((e.index, s)))
        n += 1
        if not r.is_family or (r.label.index, r.label.params) != (e.index, s):
            bad.append(f"{_name(e, s)} -> {r.label or r.verdict}")
    elapsed = time.time() - t0
    few = [e.label for e in CATALOG if e.params and len(e.samples) < 5]
    ok = not bad and not few and elapsed < 10
    acceptance_report(3, ok, f"{n} tensors in {elapsed:.2f}s; failures {bad or 'none'}")
    assert ok, bad


def _random_invertible(rng):
    while True:
        m = tuple(tuple(F(rng.randint(-3, 3)) for _ in range(3)) for _ in range(3))
        if det(m) != 0:
            return m


def test_criterion_4_conjugation_invariance(acceptance_report):
    rng = random.Random(4)
    t0 = time.time()
    bad = []
    n = 0
    for e, s in _family_samples():
        t = e.tensor(s)
        for _ in range(25):
            r = classify(conjugate(t, _random_invertible(rng)))
            n += 1
            if not r.is_family or (r.label.index, r.label.params) != (e.index, s):
                bad.append(f"{_name(e, s)} -> {r.label or r.verdict}")
    elapsed = time.time() - t0
    ok = not bad and elapsed < 60
    acceptance_report(4, ok, f"{n} conjugations in {elapsed:.1f}s; failures {len(bad)}")
    assert ok, bad[:10]


def _locus_type(t):
    hits = find_idempotents_numeric(t, grid_radius=2)
    return tuple(sorted({h.local_dim for h in hits})), sum(1 for h in hits if h.local_dim == 0) > 0


def fingerprint(t):
    r = classify(t)
    label = (r.label.index, r.label.params) if r.is_family else (r.verdict,)
    return (derivation_algebra(t).dimension, annihilator(t).dim, squared_subalgebra(t).dim, _locus_type(t), label)


def test_criterion_5_fingerprint_separation(acceptance_report):
    prints = {}
    for e, s in _family_samples():
        prints[(e.index, s)] = fingerprint(e.tensor(s))
    collisions = [(a, b) for a, b in itertools.combinations(prints, 2) if prints[a] == prints[b]]
    expected_dims = [k for k, fp in prints.items() if fp[:3] != (CATALOG[k[0] - 1].der_dim,
                                                                CATALOG[k[0] - 1].ann_dim,
                                                                CATALOG[k[0] - 1].square_dim)]
    ok = not collisions and not expected_dims
    acceptance_report(5, ok, f"{len(prints)} fingerprints, {len(collisions)} collisions, "
                             f"{len(expected_dims)} with unexpected dims")
    assert ok


def test_criterion_6_emitted_systems(acceptance_report):
    unflagged = []
    differs = {}
    for e, s in _family_samples():
        same = system_of(e.tensor(s)) == e.reference_system(s)
        if e.reference_erratum:
            differs[e.label] = differs.get(e.label, False) or not same
        elif not same:
            unflagged.append(_name(e, s))
    flagged = sorted(differs, key=lambda x: int(x[1:]))
    idle_flags = [k for k, v in differs.items() if not v]
    ok = not unflagged and not idle_flags and len(flagged) == 1
    acceptance_report(6, ok, f"unflagged mismatches {unflagged or 'none'}; erratum flags {flagged} "
                             f"(criterion allows exactly one)")
    assert ok


IDEMPOTENT_CASES = [
    ("T1(0,0)", table_t1(0, 0), lambda u: np.allclose(u, (0, 0, 1), atol=1e-8)),
    ("T1(1/4,1/4)", table_t1(F(1, 4), F(1, 4)),
     lambda u: np.allclose(u, (0, 0, 1), atol=1e-8) or (abs(u[2] - 2) < 1e-8 and abs(u[0] * u[1] + 1) < 1e-8)),
    ("T2(1/2,1/2)", table_t2(F(1, 2), F(1, 2)), lambda u: abs(u[2] - 1) < 1e-8),
    ("T3(1,1)", table_t3(1, 1), lambda u: abs(u[2] - 0.5) < 1e-8 and abs(u[0] * u[1] - 0.25) < 1e-8),
    ("T6(0,1/2)", table_t6(0, F(1, 2)), lambda u: abs(u[2] - 1) < 1e-8 and abs(u[0] - u[1] ** 2) < 1e-8),
]


def test_criterion_7_idempotent_oracle(acceptance_report):
    problems = []
    counts = []
    for name, t, on_locus in IDEMPOTENT_CASES:
        hits = find_idempotents_numeric(t)
        counts.append(len(hits))
        if not hits:
            problems.append(f"{name}: none found")
        for h in hits:
            if h.residual >= 1e-10 or not on_locus(np.array(h.point)):
                problems.append(f"{name}: {h.point}")
            if h.exact is not None and not is_idempotent_element(t, h.exact):
                problems.append(f"{name}: exact {h.exact} fails")
    ok = not problems
    acceptance_report(7, ok, f"hits per case {counts}; problems {problems[:5] or 'none'}")
    assert ok, problems


def test_criterion_8_dynamics(acceptance_report):
    t0 = time.time()
    # (a) equilibria at nilpotent points, round-robin over families
    pools = [nilpotent_grid_points(e.tensor(e.samples[0]), 1) for e in CATALOG]
    points = []
    for group in itertools.zip_longest(*pools):
        for i, p in enumerate(group):
            if p is not None and len(points) < 100:
                points.append((CATALOG[i].tensor(CATALOG[i].samples[0]), p))
    eq_bad = [p for t, p in points if check_equilibrium(t, p) != 0 or not is_nilpotent_element(t, p)]
    # (b) ray solutions for every family with idempotents
    ray_worst = 0.0
    ray_families = 0
    for e in CATALOG:
        t = e.tensor(e.samples[0])
        hits = find_idempotents_numeric(t, grid_radius=1)
        if e.idempotents == "empty":
            continue
        ray_families += 1
        h = hits[0]
        u = h.exact if h.exact is not None else h.point
        for c0 in (1.0, -1.0):
            ray_worst = max(ray_worst, check_ray_solution(t, u, c0=c0, horizon_fraction=0.9, dt=1e-4))
    # (c) planarity on A8 and A9
    plan = max(planarity_statistic(CATALOG[i - 1].tensor(()), x0, 0.5, 1e-3)
               for i in (8, 9) for x0 in ((1, 1, 1), (0.3, -0.7, 0.5), (-1, 0.2, 0.9)))
    # (d) drift of every catalog ideal
    drift = 0.0
    n_ideals = 0
    for e in CATALOG:
        t = e.tensor(e.samples[0])
        for ideal in e.ideals:
            n_ideals += 1
            drift = max(drift, check_invariant_set(t, invariant_set_from_subspace(ideal), 8, t_end=0.5, dt=1e-3))
    elapsed = time.time() - t0
    ok = (len(points) == 100 and not eq_bad and ray_worst < 1e-6 and plan < 1e-8 and drift < 1e-8
          and elapsed < 120)
    acceptance_report(8, ok, f"{len(points)} equilibria ({len(eq_bad)} bad); ray error {ray_worst:.1e} over "
                             f"{ray_families} families; planarity {plan:.1e}; drift {drift:.1e} over "
                             f"{n_ideals} ideals; {elapsed:.1f}s")
    assert ok
