"""Randomized certification suites shared by ``equicover fuzz`` and the tests.

Each runner takes a ``random.Random`` and returns ``(passed, record)`` where the
record is JSON-ready and carries enough to replay the instance.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import io
from .cover import Cover, dimension
from .errors import EquicoverError
from .generators import (
    cycle_group,
    max_boundary_count,
    random_ball_cover,
    random_complex,
    random_equivariant_collection,
    random_instance,
)
from .group import Action, quotient
from .metric import cycle_space
from .nerve import canonical_cover_check, pb_star_vertex_ok, pull_back_canonical
from .pipeline import proposition_32_partial, proposition_33
from .refine import equivariant_refine, pi_z_injection_check
from .sets import SampledSet, whole


def _instance_record(space, group=None, cover=None) -> dict:
    rec = {"space": io.space_to_dict(space)}
    if group is not None:
        rec["group"] = io.group_to_dict(group)
    if cover is not None:
        rec["cover"] = io.cover_to_dict(cover)
    return rec


def run_refine(rng: random.Random) -> tuple[bool, dict]:
    """Random poset or cycle with a G-cover; refine at n = dim(cover); certify + π_z."""
    kind = rng.choice(["poset", "metric"])
    space, action, cover, name = random_instance(rng, kind)
    rec = {"kind": kind, "group_name": name, "instance": _instance_record(space, action.group, cover)}
    n = dimension(cover)
    try:
        res = equivariant_refine(cover, action, n)
    except EquicoverError as exc:
        rec["error"] = str(exc)
        return False, rec
    pi_z = all(pi_z_injection_check(res, z) for z in space.points)
    checks = {k: v for k, v in res.checks.items() if isinstance(v, bool)}
    rec.update({"checks": res.checks, "pi_z": pi_z})
    return all(checks.values()) and pi_z, rec


def run_canonical(rng: random.Random) -> tuple[bool, dict]:
    k = random_complex(rng)
    rep = canonical_cover_check(k)
    rec = {"instance": io.complex_to_dict(k), "report": {x: rep[x] for x in rep if x != "counts"}}
    return rep["passed"] and rep["counts_exact"], rec


def run_pullback(rng: random.Random) -> tuple[bool, dict]:
    space = cycle_space(rng.choice([6, 12]))
    cover = random_ball_cover(rng, space, count=rng.randint(2, 5))
    rec = {"instance": _instance_record(space, cover=cover)}
    try:
        pb = pull_back_canonical(cover)
    except EquicoverError as exc:
        rec["error"] = str(exc)
        return False, rec
    star = all(pb_star_vertex_ok(pb, i) for i in range(len(cover)))
    vertex_in_sigma = all(w is not None for w in pb.checks["refinement_witness"])
    rec["checks"] = {k: v for k, v in pb.checks.items() if k != "refinement_witness"}
    ok = all(v for v in rec["checks"].values()) and star and vertex_in_sigma
    return ok, rec


def random_p33_instance(rng: random.Random):
    n_pts, gname = rng.choice([(6, "C2"), (6, "C3"), (8, "C2"), (8, "C4"), (12, "C2"), (12, "C3"), (12, "D3")])
    space = cycle_space(n_pts)
    action = Action(cycle_group(n_pts, gname), space)
    u = random_equivariant_collection(rng, action, count=rng.randint(1, 2))
    k = max_boundary_count(u)
    delta = rng.choice([Fraction(5, 2), Fraction(3), Fraction(4)])
    return space, action, u, k, delta, gname


def run_p33(rng: random.Random) -> tuple[bool, dict]:
    space, action, u, k, delta, gname = random_p33_instance(rng)
    rec = {"group_name": gname, "k": k, "delta": str(delta),
           "instance": _instance_record(space, action.group, u)}
    try:
        res = proposition_33(space, action, u, k, 1, delta)
    except EquicoverError as exc:
        rec["error"] = str(exc)
        return False, rec
    rec["certificate"] = {name: p["passed"] for name, p in res.certificate.items()}
    return res.passed, rec


def run_p32(rng: random.Random) -> tuple[bool, dict]:
    n_pts = rng.choice([12, 24])
    names = [g for g in ("C2", "C4", "D2", "C6", "D3", "C12", "D6", "D12") if n_pts % int(g[1:]) == 0]
    gname = rng.choice(names)
    space = cycle_space(n_pts)
    action = Action(cycle_group(n_pts, gname), space)
    u = Cover(space, [whole(space)])
    c = rng.randrange(n_pts)
    alpha = [SampledSet(space, *space.ball_masks(c, Fraction(rng.randint(1, 3), 1) + Fraction(1, 2)))]
    rec = {"group_name": gname, "group_order": action.group.order}
    try:
        res = proposition_32_partial(space, action, u, alpha, 1)
    except EquicoverError as exc:
        rec["error"] = str(exc)
        return False, rec
    rec["dim_v_f"] = res.report["dim_v_f"]
    ok = res.report["dim_v_f_le_n"] and res.report["conclusion_1"]["passed"] and res.report["v_f_is_f_cover"]
    return ok, rec


def run_quotient(rng: random.Random) -> tuple[bool, dict]:
    from .group import check_projection

    space, action, _, name = random_instance(rng, rng.choice(["poset", "metric"]))
    rec = {"group_name": name, "instance": _instance_record(space, action.group)}
    try:
        q = quotient(action)
    except EquicoverError as exc:
        rec["error"] = str(exc)
        return False, rec
    cert = check_projection(q)
    rec["certificate"] = cert.as_dict()
    # a metric quotient re-validates the metric axioms when it is constructed
    return cert.passed, rec


SUITES = {
    "refine": run_refine,
    "canonical-cover": run_canonical,
    "pullback": run_pullback,
    "p33": run_p33,
    "p32": run_p32,
    "quotient": run_quotient,
}


def instance_rng(seed: int, i: int) -> random.Random:
    """Independent per-instance stream, so instances can run in any order."""
    return random.Random(f"{seed}:{i}")


def run_suite(name: str, count: int, seed: int, jobs: int = 1) -> list[tuple[bool, dict]]:
    runner = SUITES[name]
    if jobs <= 1:
        return [runner(instance_rng(seed, i)) for i in range(count)]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, [(name, seed, i) for i in range(count)]))


def _run_one(args):
    name, seed, i = args
    return SUITES[name](instance_rng(seed, i))
