"""Command line interface: ``hqds <command> ...``."""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import annihilator, conjugate, squared_subalgebra
from .catalog import ParamOutOfRange, catalog_listing, entry, format_system
from .classifier import DEFAULT_TOL, classify
from .derivations import derivation_algebra
from .dynamics import (
    QuadraticField,
    check_equilibrium,
    check_invariant_set,
    check_ray_solution,
    export_trajectory,
    integrate,
    invariant_set_from_subspace,
    planarity_statistic,
)
from .io import (
    AlgebraDocument,
    DocumentError,
    classification_report,
    dumps,
    format_rational,
    short_rational,
    format_report_text,
    invariant_battery,
    matrix_strings,
    parse_rational,
)
from .numeric import det, identity

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_CLASSIFIABLE = 3
EXIT_NUMERIC = 4

CHECKS = ("ray", "planarity", "equilibrium", "invariant-set")


class UsageError(ValueError):
    pass


def _write_json(path, obj) -> None:
    if path:
        Path(path).write_text(dumps(obj))


def _rationals(text: str) -> tuple:
    if not text:
        return ()
    try:
        return tuple(parse_rational(p) for p in text.split(","))
    except DocumentError as exc:
        raise UsageError(str(exc)) from exc


def _floats(text: str, n: int) -> tuple:
    try:
        vals = tuple(float(Fraction(p.strip())) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r} as numbers") from exc
    if len(vals) != n:
        raise UsageError(f"expected {n} comma-separated numbers, got {len(vals)}")
    return vals


def seeded_matrix(seed: int):
    """Seed 0 gives the identity; otherwise entries in -3..3 with det != 0."""
    if seed == 0:
        return identity(3)
    rng = random.Random(seed)
    while True:
        m = tuple(tuple(Fraction(rng.randint(-3, 3)) for _ in range(3)) for _ in range(3))
        if det(m) != 0:
            return m


# ---------------------------------------------------------------------------
# commands; each returns an exit code
# ---------------------------------------------------------------------------

def cmd_classify(args, out) -> int:
    doc = AlgebraDocument.load(args.path)
    result = classify(doc.tensor, mode=args.mode, tol=args.tol)
    rep = classification_report(doc.tensor, result)
    out.write(format_report_text(rep))
    _write_json(args.json_out, rep)
    if result.verdict == "NotClassifiable":
        return EXIT_NUMERIC if result.numeric_failure else EXIT_NOT_CLASSIFIABLE
    return EXIT_OK


def cmd_emit(args, out) -> int:
    e = entry(args.family)
    params = _rationals(args.params)
    t = e.tensor(params)
    if args.system:
        out.write(format_system(t) + "\n")
        _write_json(args.json_out, {"family": e.label, "params": [format_rational(p) for p in params],
                                    "system": format_system(t).splitlines()})
        return EXIT_OK
    meta = {"name": e.label, "expected_family": e.label, "params": [format_rational(p) for p in params]}
    doc = AlgebraDocument(t, meta)
    out.write(doc.dumps())
    _write_json(args.json_out, doc.to_dict())
    return EXIT_OK


def cmd_conjugate(args, out) -> int:
    doc = AlgebraDocument.load(args.path)
    m = seeded_matrix(args.seed)
    meta = dict(doc.metadata)
    meta["conjugation"] = {"seed": args.seed, "matrix": matrix_strings(m)}
    new = AlgebraDocument(conjugate(doc.tensor, m), meta)
    out.write(new.dumps())
    _write_json(args.json_out, new.to_dict())
    return EXIT_OK


def _vectors(vs) -> str:
    return "[" + ", ".join("(" + ", ".join(short_rational(x) for x in v) + ")" for v in vs) + "]"


def cmd_invariants(args, out) -> int:
    doc = AlgebraDocument.load(args.path)
    inv = invariant_battery(doc.tensor)
    out.write(f"dim Der = {inv['dim_der']}\n")
    out.write(f"dim Ann = {inv['dim_ann']}  basis {_vectors(inv['annihilator_basis'])}\n")
    out.write(f"dim A^2 = {inv['dim_square']}  basis {_vectors(inv['square_basis'])}\n")
    idem = inv["idempotents"]
    out.write(f"idempotents found: {idem['count']} (local dims {idem['local_dims']})\n")
    for p in idem["exact"]:
        out.write("  (" + ", ".join(short_rational(x) for x in p) + ")\n")
    _write_json(args.json_out, inv)
    return EXIT_OK


def cmd_derivations(args, out) -> int:
    doc = AlgebraDocument.load(args.path)
    der = derivation_algebra(doc.tensor)
    out.write(f"dim Der = {der.dimension}\n")
    for i, d in enumerate(der.basis, 1):
        out.write(f"D{i}:\n")
        for row in d:
            out.write("  [" + ", ".join(str(x) for x in row) + "]\n")
    _write_json(args.json_out, {"dim_der": der.dimension, "basis": [matrix_strings(d) for d in der.basis]})
    return EXIT_OK


def _ray_check(t, x0, dt) -> dict:
    x = np.array(x0, dtype=float)
    v = QuadraticField(t)(x)
    lam = float(x @ v) / float(x @ x) if np.any(x) else 0.0
    if lam == 0 or np.max(np.abs(v - lam * x)) > 1e-12 * max(1.0, np.max(np.abs(v))):
        return {"applicable": False, "reason": "x0 is not on an idempotent ray"}
    u = tuple(float(c) / lam for c in x0)
    err = check_ray_solution(t, u, c0=lam, horizon_fraction=0.9, dt=dt)
    return {"applicable": True, "c0": lam, "max_relative_error": err}


def cmd_simulate(args, out) -> int:
    doc = AlgebraDocument.load(args.path)
    t = doc.tensor
    x0 = _floats(args.x0, 3)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()] if args.checks else []
    for c in checks:
        if c not in CHECKS:
            raise UsageError(f"unknown check {c!r}; choose from {', '.join(CHECKS)}")
    rec = integrate(t, x0, args.t, args.dt)
    res: dict = {
        "steps": len(rec.times) - 1,
        "step": rec.step,
        "final_time": rec.times[-1],
        "final_state": list(rec.states[-1]),
        "blow_up": None if rec.blow_up is None else {"time": rec.blow_up.time, "norm": rec.blow_up.norm},
        "checks": {},
    }
    out.write(f"integrated {res['steps']} steps of {rec.step:.3g} to t = {rec.times[-1]:.6g}\n")
    out.write("final state: (" + ", ".join(f"{c:.12g}" for c in rec.states[-1]) + ")\n")
    if rec.blow_up is not None:
        out.write(f"blow-up approached at t = {rec.blow_up.time:.6g} (|x| = {rec.blow_up.norm:.3g})\n")
    for c in checks:
        if c == "ray":
            r = _ray_check(t, x0, args.dt)
        elif c == "planarity":
            r = {"statistic": planarity_statistic(t, x0, args.t, args.dt)}
        elif c == "equilibrium":
            r = {"residual": float(check_equilibrium(t, x0))}
        else:
            r = {}
            for name, sub in (("annihilator", annihilator(t)), ("square", squared_subalgebra(t))):
                if 0 < sub.dim < 3:
                    spec = invariant_set_from_subspace(sub.basis)
                    r[name] = check_invariant_set(t, spec, 8, t_end=args.t, dt=args.dt)
        res["checks"][c] = r
        out.write(f"{c}: " + ", ".join(f"{k} = {v}" for k, v in sorted(r.items())) + "\n")
    if args.export:
        with open(args.export, "w") as fh:
            export_trajectory(rec, fh)
    _write_json(args.json_out, res)
    return EXIT_OK


def cmd_catalog(args, out) -> int:
    listing = catalog_listing()
    for item in listing:
        params = ", ".join(item["params"]) or "-"
        out.write(f"{item['label']:>4}  {item['table']:<4} params: {params:<12} "
                  f"dims Der/Ann/A^2 = {item['dim_der']}/{item['dim_ann']}/{item['dim_square']}  "
                  f"idempotents: {item['idempotents']}")
        if item["range"]:
            out.write(f"  range: {item['range']}")
        out.write("\n")
    out.write(f"{len(listing)} families\n")
    _write_json(args.json_out, listing)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hqds", description="Quadratic systems on R^3 and their algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_json(sp):
        sp.add_argument("--json-out", metavar="PATH", help="write a machine-readable result here")
        return sp

    c = with_json(sub.add_parser("classify", help="classify an algebra document"))
    c.add_argument("path")
    c.add_argument("--mode", choices=("exact", "float"), default="exact")
    c.add_argument("--tol", type=float, default=DEFAULT_TOL, help="tolerance, float mode only")
    c.set_defaults(func=cmd_classify)

    e = with_json(sub.add_parser("emit", help="canonical document or system of a family"))
    e.add_argument("--family", type=int, required=True)
    e.add_argument("--params", default="", help="comma-separated rationals, e.g. 1/2,3")
    e.add_argument("--system", action="store_true", help="print the differential system instead")
    e.set_defaults(func=cmd_emit)

    g = with_json(sub.add_parser("conjugate", help="apply a seeded random change of basis"))
    g.add_argument("path")
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_conjugate)

    i = with_json(sub.add_parser("invariants", help="annihilator, square and idempotents"))
    i.add_argument("path")
    i.set_defaults(func=cmd_invariants)

    d = with_json(sub.add_parser("derivations", help="basis of the derivation algebra"))
    d.add_argument("path")
    d.set_defaults(func=cmd_derivations)

    s = with_json(sub.add_parser("simulate", help="integrate the system and run checks"))
    s.add_argument("path")
    s.add_argument("--x0", required=True, help="start point a,b,c")
    s.add_argument("--t", type=float, default=0.5, help="end time")
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--checks", default="", help="comma list from: " + ", ".join(CHECKS))
    s.add_argument("--export", metavar="PATH", help="write the trajectory as t,x1,x2,x3 lines")
    s.set_defaults(func=cmd_simulate)

    k = with_json(sub.add_parser("catalog", help="list the 35 families"))
    k.set_defaults(func=cmd_catalog)
    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (DocumentError, ParamOutOfRange, UsageError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
