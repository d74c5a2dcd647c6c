"""Command-line front end. Every subcommand prints (or writes) one canonical JSON
report; exit codes: 0 ok, 2 input, 3 cap/resolution, 4 precondition, 5 certificate."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import io
from .cover import Cover, dimension, gcover_check
from .errors import EquicoverError, InputError
from .group import Action, PermGroup, check_projection, dimension_equality_check, orbits, quotient
from .metric import FiniteMetricSpace
from .nerve import (
    barycentric_subdivision,
    canonical_cover_check,
    carrier_chain,
    nerve,
    nerve_map,
    pull_back_canonical,
    to_dot,
)
from .pipeline import cover_of_z, proposition_32_partial, proposition_33
from .poset import FinitePoset, covering_dimension
from .refine import equivariant_refine, pi_z_injection_check, pointwise_multiplicity_bound
from .suites import SUITES, run_suite


def _action(args, space) -> Action:
    group = io.load_group(args.group) if args.group else PermGroup.trivial(space.n)
    return Action(group, space)


def _simplex_names(cover: Cover, s) -> list[str]:
    return [cover.labels[i] for i in sorted(s)]


def cmd_gcover_check(args) -> tuple[int, dict]:
    space = io.load_space(args.space)
    action = _action(args, space)
    cover = io.load_cover(space, args.cover)
    rep = gcover_check(cover, action)
    report = {"covers": cover.is_cover, **rep.as_dict()}
    return (0 if rep.is_gcover else 5), report


def cmd_refine(args) -> tuple[int, dict]:
    space = io.load_space(args.space)
    action = _action(args, space)
    cover = io.load_cover(space, args.cover)
    res = equivariant_refine(cover, action, args.dim, selection=args.selection)
    report = {
        "checks": res.checks,
        "dim": dimension(res.cover),
        "cover": io.cover_to_dict(res.cover),
        "quotient_refinement": io.cover_to_dict(res.plan.refinement),
        "provenance": [
            {"label": l, "V": res.plan.refinement.labels[v], "h": h}
            for l, (v, h) in zip(res.cover.labels, res.provenance)
        ],
    }
    ok = True
    if args.certify:
        pi_z = {z: pi_z_injection_check(res, z) for z in space.points}
        report["pi_z_injective"] = pi_z
        report["pointwise_multiplicity_bound"] = pointwise_multiplicity_bound(res)
        ok = all(pi_z.values()) and report["pointwise_multiplicity_bound"]
    if args.out:
        io.write_text(args.out, io.dumps(io.cover_to_dict(res.cover)))
    return (0 if ok else 5), report


def cmd_quotient(args) -> tuple[int, dict]:
    space = io.load_space(args.space)
    action = _action(args, space)
    q = quotient(action)
    cert = check_projection(q)
    report = {
        "orbits": [list(o) for o in orbits(action)],
        "quotient": io.space_to_dict(q.space),
        "projection": {p: q.space.points[q.projection[i]] for i, p in enumerate(space.points)},
        "certificate": cert.as_dict(),
    }
    if args.out:
        io.write_text(args.out, io.dumps(io.space_to_dict(q.space)))
    return (0 if cert.passed else 5), report


def cmd_dim(args) -> tuple[int, dict]:
    space = io.load_space(args.space)
    if not isinstance(space, FinitePoset):
        raise InputError("covering dimension is only computed for poset spaces")
    report = {"points": space.n, "covering_dimension": covering_dimension(space)}
    if args.group:
        report["quotient_report"] = dimension_equality_check(_action(args, space)).as_dict()
    return 0, report


def cmd_nerve(args) -> tuple[int, dict]:
    space = io.load_space(args.space)
    cover = io.load_cover(space, args.cover)
    nv = nerve(cover)
    report = {
        "vertices": list(cover.labels),
        "simplices": [_simplex_names(cover, s) for s in nv.simplices],
        "dim": nv.dim,
        "f_vector": nv.f_vector(),
    }
    if isinstance(space, FiniteMetricSpace):
        pts = {}
        for z in space.points:
            p = nerve_map(cover, z)
            pts[z] = {
                "coords": {cover.labels[i]: c for i, c in enumerate(p.coords) if c},
                "carrier_chain": [_simplex_names(cover, s) for s in carrier_chain(p)],
            }
        report["map"] = pts
    return 0, report


def cmd_canonical_cover(args) -> tuple[int, dict]:
    k = io.load_complex(args.complex)
    rep = canonical_cover_check(k)
    return (0 if rep["passed"] else 5), rep


def cmd_pullback(args) -> tuple[int, dict]:
    space = io.load_space(args.space)
    cover = io.load_cover(space, args.cover)
    pb = pull_back_canonical(cover)
    grades = []
    for j, g in enumerate(pb.grades):
        grades.append([
            {"sigma": _simplex_names(cover, s), **io.set_to_descriptor(v)} for s, v in g
        ])
    checks = dict(pb.checks)
    checks["refinement_witness"] = [
        None if w is None else cover.labels[w] for w in checks["refinement_witness"]
    ]
    return 0, {"grades": grades, "checks": checks, "nerve_dim": pb.nerve.dim}


def _metric_inputs(args):
    space = io.load_space(args.space)
    action = _action(args, space)
    collection = io.load_cover(space, args.collection)
    return space, action, collection


def cmd_cover_of_z(args) -> tuple[int, dict]:
    space, action, u = _metric_inputs(args)
    res = cover_of_z(space, action, u, args.k, args.delta, args.n)
    return 0, {
        "checks": res.checks,
        "cover": io.cover_to_dict(res.cover),
        "initial_cover": io.cover_to_dict(res.initial),
        "radii": res.radii,
        "a_counts": dict(zip(space.points, res.a_counts)),
        "boundary_counts": dict(zip(space.points, res.boundary_counts)),
    }


def cmd_p33(args) -> tuple[int, dict]:
    space, action, u = _metric_inputs(args)
    res = proposition_33(space, action, u, args.k, args.n, args.delta, m_cap=args.m_cap)
    report = {
        "params": res.params,
        "properties": res.certificate,
        "passed": res.passed,
        "grades": [io.cover_to_dict(g) for g in res.grades],
        "provenance": res.provenance,
    }
    return (0 if res.passed else 5), report


def cmd_p32(args) -> tuple[int, dict]:
    space, action, u = _metric_inputs(args)
    alpha = io.alpha_from_data(u, io.read_json(args.alpha)) if args.alpha else [
        io.SampledSet(space, 0, 0) for _ in u.elements
    ]
    res = proposition_32_partial(space, action, u, alpha, args.n, m_cap=args.m_cap,
                                 orbit_baseline=args.baseline)
    report = {
        "report": res.report,
        "v_f": io.cover_to_dict(res.v_f),
        "beta": {l: io.set_to_descriptor(b) for l, b in zip(u.labels, res.beta)},
    }
    ok = res.report["conclusion_1"]["passed"] and res.report["dim_v_f_le_n"]
    return (0 if ok else 5), report


def cmd_fuzz(args) -> tuple[int, dict]:
    results = run_suite(args.suite, args.count, args.seed, jobs=args.jobs)
    failures = [(i, rec) for i, (ok, rec) in enumerate(results) if not ok]
    if args.save_failures and failures:
        out = Path(args.save_failures)
        out.mkdir(parents=True, exist_ok=True)
        for i, rec in failures:
            io.write_text(out / f"{args.suite}-{args.seed}-{i}.json", io.dumps(rec))
    passed = len(results) - len(failures)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "count": len(results),
        "passed": passed,
        "pass_rate": f"{passed}/{len(results)}",
        "failures": [{"index": i, **rec} for i, rec in failures],
    }
    return (0 if not failures else 5), report


def cmd_export_dot(args) -> tuple[int, str]:
    if args.complex:
        k = io.load_complex(args.complex)
        name = "K"
    elif args.space and args.cover:
        space = io.load_space(args.space)
        cover = io.load_cover(space, args.cover)
        nv = nerve(cover)
        from .nerve import SimplicialComplex

        k = SimplicialComplex([_simplex_names(cover, s) for s in nv.simplices])
        name = "nerve"
    else:
        raise InputError("export-dot needs --complex, or --space with --cover")
    if args.subdivide:
        k = barycentric_subdivision(k).complex
        name = "b" + name
    return 0, to_dot(k, name)


def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="equicover", description=__doc__.splitlines()[0])
    p.add_argument("--caps", help="cap overrides, e.g. poset_points=16,search_nodes=1000000")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        sp.add_argument("--space", required=True)
        if group:
            sp.add_argument("--group", help="group JSON; the trivial group if omitted")
        sp.add_argument("--report", help="write the JSON report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="accepted for uniformity; runs are deterministic")

    sp = sub.add_parser("gcover-check", help="equivariance and disjoint-or-equal law of a cover")
    common(sp)
    sp.add_argument("--cover", required=True)
    sp.set_defaults(func=cmd_gcover_check)

    sp = sub.add_parser("refine", help="F-refinement of bounded dimension")
    common(sp)
    sp.add_argument("--cover", required=True)
    sp.add_argument("--dim", type=_positive_int, required=True)
    sp.add_argument("--out")
    sp.add_argument("--certify", action="store_true")
    sp.add_argument("--selection", choices=["least", "greatest"], default="least")
    sp.set_defaults(func=cmd_refine)

    sp = sub.add_parser("quotient", help="orbit space and projection certificate")
    common(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("dim", help="covering dimension of a poset (and of its quotient)")
    common(sp)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("nerve", help="nerve of a cover and the weighted map into it")
    common(sp, group=False)
    sp.add_argument("--cover", required=True)
    sp.set_defaults(func=cmd_nerve)

    sp = sub.add_parser("canonical-cover", help="check the star cover of a barycentric subdivision")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--report")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_canonical_cover)

    sp = sub.add_parser("pullback", help="pull back the canonical cover along the nerve map")
    common(sp, group=False)
    sp.add_argument("--cover", required=True)
    sp.set_defaults(func=cmd_pullback)

    for name, func in (("cover-of-z", cmd_cover_of_z), ("p33", cmd_p33)):
        sp = sub.add_parser(name, help="small F-cover" if name == "cover-of-z" else "graded cover with certificate")
        common(sp)
        sp.add_argument("--collection", required=True)
        sp.add_argument("-k", type=_positive_int, required=True)
        sp.add_argument("-n", type=_positive_int, default=1)
        sp.add_argument("--delta", required=True)
        if name == "p33":
            sp.add_argument("--m-cap", type=int, default=None)
        sp.set_defaults(func=func)

    sp = sub.add_parser("p32", help="delta, order-independent F-refinement, candidate beta")
    common(sp)
    sp.add_argument("--collection", required=True)
    sp.add_argument("--alpha", help="JSON object: label -> set descriptor (default: all empty)")
    sp.add_argument("-n", type=_positive_int, default=1)
    sp.add_argument("--m-cap", type=int, default=None)
    sp.add_argument("--baseline", action="store_true", help="also report dim of the orbit of a plain refinement")
    sp.set_defaults(func=cmd_p32)

    sp = sub.add_parser("fuzz", help="run a certifier on seeded random instances")
    sp.add_argument("--suite", choices=sorted(SUITES), required=True)
    sp.add_argument("--count", type=_positive_int, default=100)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--save-failures")
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("export-dot", help="DOT for a complex, its subdivision, or a nerve")
    sp.add_argument("--complex")
    sp.add_argument("--space")
    sp.add_argument("--cover")
    sp.add_argument("--subdivide", action="store_true")
    sp.add_argument("--report", help="write the DOT text here instead of stdout")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_export_dot)
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        io.write_text(path, text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    previous = os.environ.get("EQUICOVER_CAPS")
    if args.caps:
        # worker processes of fuzz --jobs inherit the variable
        os.environ["EQUICOVER_CAPS"] = args.caps
    try:
        return _run(args)
    finally:
        if previous is None:
            os.environ.pop("EQUICOVER_CAPS", None)
        else:
            os.environ["EQUICOVER_CAPS"] = previous


def _run(args) -> int:
    try:
        code, report = args.func(args)
    except EquicoverError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "witness": exc.witness}
        if getattr(exc, "stage", None):
            err["stage"] = exc.stage
        sys.stderr.write(io.dumps(err))
        return exc.exit_code
    text = report if isinstance(report, str) else io.dumps(report)
    _emit(text, args.report)
    return code

if __name__ == "__main__":
    sys.exit(main())
