"""Graded small covers: the per-point construction of a small F-cover, the
nerve pull-back, the shrink step, the assembled seven-property certifier, and
the implementable part of the boundary general-position step."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from ._bits import bits, is_subset
from .caps import Caps
from .cover import Cover, dimension, gcover_check, intersecting_not_contained, is_refinement
from .errors import (
    CapError,
    CertificateError,
    EquicoverError,
    InputError,
    PreconditionError,
    ResolutionError,
)
from .group import Action, inverse
from .metric import FiniteMetricSpace, diameter, dist_to_complement
from .nerve import pull_back_canonical
from .rational import INF, format_rational, largest_grid_below, parse_rational
from .refine import equivariant_refine
from .sets import SampledSet, complement, intersect, translate, union, whole


class _stage:
    """Prefix errors raised inside a pipeline stage with the stage name."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, EquicoverError) and not getattr(exc, "stage", None):
            exc.stage = self.name
            exc.args = (f"[{self.name}] {exc.args[0]}",) + exc.args[1:]
        return False


def _require_metric(space) -> FiniteMetricSpace:
    if not isinstance(space, FiniteMetricSpace):
        raise InputError("this construction needs a finite metric space")
    return space


def hypothesis_check(u_cover: Cover, k: int) -> tuple[bool, list[str] | None]:
    """Every subfamily with more than k members has empty common boundary.

    Only subfamilies of size k+1 are tried: bigger ones have smaller intersections.
    """
    if k < 0:
        raise InputError("k must be nonnegative")
    bounds = [e.boundary for e in u_cover.elements]
    full = u_cover.space.full_mask
    for combo in combinations(range(len(bounds)), k + 1):
        common = full
        for i in combo:
            common &= bounds[i]
            if not common:
                break
        if common:
            return False, [u_cover.labels[i] for i in combo]
    return True, None


def boundary_counts(u_cover: Cover) -> list[int]:
    counts = [0] * u_cover.space.n
    for e in u_cover.elements:
        for z in bits(e.boundary):
            counts[z] += 1
    return counts


def _radius_grid(rho: Fraction, limit: Fraction) -> list[Fraction]:
    """Multiples of rho up to and including ``limit``."""
    out = []
    r = rho
    while r <= limit:
        out.append(r)
        r += rho
    return out


def _small_radius(rho: Fraction, delta: Fraction) -> Fraction:
    grid = [r for r in _radius_grid(rho, delta / 2) if r < delta / 2]
    if not grid:
        raise ResolutionError(
            f"no radius >= rho={format_rational(rho)} below delta/2={format_rational(delta / 2)}",
            witness={"rho": format_rational(rho), "delta": format_rational(delta)},
        )
    return grid[-1]


def _orbit_disjoint(space: FiniteMetricSpace, action: Action, z: int, r: Fraction) -> bool:
    inner = space.ball_masks(z, r)[0]
    for g in action.group.elements:
        gz = g[z]
        if gz != z and inner & space.ball_masks(gz, r)[0]:
            return False
    return True


def _pick_radius(space, grid, ok, z):
    """Largest valid grid radius; among radii giving the same ball, the smallest."""
    valid = [r for r in grid if ok(r)]
    if not valid:
        return None
    shape = space.ball_masks(z, valid[-1])
    return next(r for r in grid if space.ball_masks(z, r) == shape)


@dataclass
class CoverOfZResult:
    cover: Cover  # after the equivariant refinement
    initial: Cover  # the F-cover built point by point
    refinement: object  # EquivariantRefinement
    radii: dict
    a_counts: list  # per point; None for points outside every closure
    boundary_counts: list[int]
    checks: dict = field(default_factory=dict)


def cover_of_z(space, action: Action, u_cover: Cover, k: int, delta, n: int = 1,
               cap: int | None = None) -> CoverOfZResult:
    """Small F-cover: diameters < delta, at most k partially met elements of 𝒰, dim <= n."""
    space = _require_metric(space)
    delta = parse_rational(delta)
    if delta <= 0:
        raise InputError("delta must be positive")
    if action.space is not space or u_cover.space is not space:
        raise InputError("space, action and collection must share one space")
    ok, witness = hypothesis_check(u_cover, k)
    if not ok:
        raise PreconditionError(
            f"boundary hypothesis fails at k={k}: common boundary of {witness}", witness=witness
        )
    if not gcover_check(u_cover, action).is_equivariant:
        raise PreconditionError("collection is not F-equivariant")

    rho = space.rho
    small = _small_radius(rho, delta)
    grid = _radius_grid(rho, small)
    closures = 0
    for u in u_cover.elements:
        closures |= u.closure
    full = space.full_mask
    c_sets: list[SampledSet] = []
    radii = {}
    a_counts: list = [None] * space.n
    for z in range(space.n):
        disjoint = lambda r, z=z: _orbit_disjoint(space, action, z, r)
        if not closures >> z & 1:
            ok_r = lambda r, z=z: not (space.ball_masks(z, r)[0] & closures) and disjoint(r)
            r = _pick_radius(space, grid, ok_r, z)
            if r is None:
                raise ResolutionError(f"no valid ball radius at {space.points[z]!r}", witness=space.points[z])
            inner, outer = space.ball_masks(z, r)
            c_sets.append(SampledSet(space, inner, outer))
            radii[space.points[z]] = format_rational(r)
            continue
        a1 = whole(space)
        a0 = whole(space)
        for u in u_cover.elements:
            if u.interior >> z & 1:
                a1 = intersect(a1, u)
            elif not u.closure >> z & 1:
                a0 = intersect(a0, complement(u))
        a = intersect(a1, a0)
        a_counts[z] = len(intersecting_not_contained(a, u_cover))
        rb = _pick_radius(space, grid, disjoint, z)
        if rb is None:
            raise ResolutionError(f"no orbit-disjoint ball at {space.points[z]!r}", witness=space.points[z])
        b = SampledSet(space, *space.ball_masks(z, rb))
        small_ball = SampledSet(space, *space.ball_masks(z, small))
        c_sets.append(intersect(intersect(a, b), small_ball))
        radii[space.points[z]] = format_rational(rb)

    w_sets = []
    for z in range(space.n):
        w = whole(space)
        for g in action.group.elements:
            w = intersect(w, translate(inverse(g), c_sets[g[z]]))
        w_sets.append(w)
    seen = {}
    for z, w in enumerate(w_sets):
        seen.setdefault(w.key, (w, f"W_{space.points[z]}"))
    initial = Cover(space, [w for w, _ in seen.values()], [l for _, l in seen.values()])
    rep = gcover_check(initial, action)
    if not initial.is_cover or not rep.is_gcover:
        raise CertificateError("point-wise neighbourhoods do not form an F-cover", witness=rep.witnesses)
    refinement = equivariant_refine(initial, action, n, cap=cap)
    result = CoverOfZResult(
        refinement.cover, initial, refinement, radii, a_counts, boundary_counts(u_cover)
    )
    result.checks = certify_cover_of_z(result, u_cover, action, k, delta, n)
    failed = [key for key, v in result.checks.items() if v is False]
    if failed:
        raise CertificateError(f"cover_of_z conclusions failed: {failed}", witness=result.checks)
    return result


def certify_cover_of_z(result: CoverOfZResult, u_cover: Cover, action: Action, k: int,
                       delta: Fraction, n: int) -> dict:
    from .cover import smallness_check

    w = result.cover
    small = smallness_check(w, delta, u_cover, k)
    keys = w.keys()
    equivariant = all(translate(g, e).key in keys for g in action.group.elements for e in w.elements)
    return {
        "covers": w.is_cover,
        "dim_le_n": dimension(w) <= n,
        "dim": dimension(w),
        "diameter_lt_delta": not small.diameter_violators,
        "partial_meets_le_k": not small.count_violators,
        "equivariant": equivariant,
        "a_count_le_boundary_count": all(
            a is None or a <= b for a, b in zip(result.a_counts, result.boundary_counts)
        ),
        "max_diameter": format_rational(small.max_diameter),
        "max_partial_meets": small.max_count,
    }


@dataclass
class ShrinkParams:
    grid: list[Fraction]  # the epsilons tried, 1/m for m = 1..chosen
    m: int

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, self.m)


def _level(space: FiniteMetricSpace, v: SampledSet, eps: Fraction) -> tuple[int, int]:
    inner = outer = 0
    for z in range(space.n):
        d = dist_to_complement(space, v, space.points[z])
        if d is INF or d > eps:
            inner |= 1 << z
        if d is INF or d >= eps:
            outer |= 1 << z
    return inner, outer


def shrink_element(v: SampledSet, eps: Fraction) -> SampledSet:
    """V_eps: interior {d(z, Z∖V) > eps}, closure {d(z, Z∖V) >= eps}."""
    return SampledSet(v.space, *_level(v.space, v, Fraction(eps)))


def shrink(cover: Cover, m_cap: int | None = None) -> tuple[Cover, ShrinkParams, list[int]]:
    """Shrink every element by the least eps = 1/m keeping a cover.

    Returns the shrunk cover (empty elements dropped), the parameters, and for
    each kept element the index of the element it came from.
    """
    space = _require_metric(cover.space)
    m_cap = Caps.from_env().m_cap if m_cap is None else m_cap
    if not cover.is_cover:
        raise PreconditionError("shrink needs a cover")
    tried = []
    deficit = None
    for m in range(1, m_cap + 1):
        eps = Fraction(1, m)
        tried.append(eps)
        shrunk = [shrink_element(v, eps) for v in cover.elements]
        covered = 0
        for s in shrunk:
            covered |= s.interior
        if covered == space.full_mask:
            keep = [i for i, s in enumerate(shrunk) if not s.is_empty]
            out = Cover(space, [shrunk[i] for i in keep], [cover.labels[i] for i in keep])
            for i in keep:
                if not is_subset(shrunk[i].closure, cover.elements[i].interior):
                    raise CertificateError(f"closure of shrunk {cover.labels[i]} leaves the element")
            return out, ShrinkParams(tried, m), keep
        deficit = space.ids(space.full_mask & ~covered)
    raise CapError(
        f"no m <= {m_cap} keeps a cover; uncovered at m_cap: {list(deficit or ())}",
        witness=list(deficit or ()),
    )


@dataclass
class GradedCoverResult:
    grades: list[Cover]
    params: dict
    provenance: list[list[dict]]
    certificate: dict
    stages: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(p["passed"] for p in self.certificate.values())

    def union(self) -> Cover:
        space = self.grades[0].space
        elems, labels = [], []
        for g in self.grades:
            elems.extend(g.elements)
            labels.extend(g.labels)
        return Cover(space, elems, labels)


def proposition_33(space, action: Action, u_cover: Cover, k: int, n: int, delta,
                   m_cap: int | None = None, cap: int | None = None) -> GradedCoverResult:
    """Graded covers 𝒱⁰..𝒱ⁿ with properties (i)-(vii), each certified by enumeration."""
    space = _require_metric(space)
    delta = parse_rational(delta)
    with _stage("hypothesis"):
        ok, witness = hypothesis_check(u_cover, k)
        if not ok:
            raise PreconditionError(
                f"boundary hypothesis fails at k={k}: common boundary of {witness}", witness=witness
            )
    with _stage("cover_of_z"):
        coz = cover_of_z(space, action, u_cover, k, delta, n, cap=cap)
    with _stage("pullback"):
        pb = pull_back_canonical(coz.cover)
    with _stage("shrink"):
        flat = pb.union()
        grade_of = [j for j, g in enumerate(pb.grades) for _ in g]
        sigma_of = [s for g in pb.grades for s, _ in g]
        shrunk, params, keep = shrink(flat, m_cap)
    if pb.nerve.dim > n:
        raise CertificateError(f"nerve dimension {pb.nerve.dim} exceeds n={n}")
    grade_elems: list[list] = [[] for _ in range(n + 1)]
    provenance: list[list[dict]] = [[] for _ in range(n + 1)]
    for pos, i in enumerate(keep):
        j = grade_of[i]
        grade_elems[j].append((shrunk.elements[pos], shrunk.labels[pos], i))
        provenance[j].append(
            {
                "label": shrunk.labels[pos],
                "sigma": [coz.cover.labels[w] for w in sorted(sigma_of[i])],
                "pullback_index": i,
            }
        )
    grades = [Cover(space, [e for e, _, _ in g], [l for _, l, _ in g]) for g in grade_elems]
    sources = [[flat.elements[i] for _, _, i in g] for g in grade_elems]
    result = GradedCoverResult(
        grades,
        {"delta": format_rational(delta), "k": k, "n": n, "m": params.m,
         "epsilon": format_rational(params.epsilon)},
        provenance,
        {},
        {"cover_of_z": coz, "pullback": pb, "shrink": params},
    )
    result.certificate = certify_graded(result, sources, u_cover, action, k, delta, params.epsilon)
    result.certificate["stage_equivariance"] = _stage_equivariance(action, coz, pb)
    return result


def _equivariant_family(action: Action, sets: list[SampledSet]) -> bool:
    keys = {s.key for s in sets}
    return all(translate(g, s).key in keys for g in action.group.elements for s in sets)


def _stage_equivariance(action: Action, coz: CoverOfZResult, pb) -> dict:
    stages = {
        "initial_cover": _equivariant_family(action, list(coz.initial.elements)),
        "refined_cover": _equivariant_family(action, list(coz.cover.elements)),
    }
    stages["pullback_grades"] = all(_equivariant_family(action, [v for _, v in g]) for g in pb.grades)
    return {"passed": all(stages.values()), **stages}


def certify_graded(result: GradedCoverResult, sources, u_cover: Cover, action: Action, k: int,
                   delta: Fraction, eps: Fraction) -> dict:
    grades = result.grades
    space = grades[0].space
    allv = [(j, v, l) for j, g in enumerate(grades) for v, l in zip(g.elements, g.labels)]

    covered = 0
    for _, v, _ in allv:
        covered |= v.interior
    uncovered = list(space.ids(space.full_mask & ~covered))
    prop_i = {"passed": not uncovered, "uncovered": uncovered}

    diam_bad = []
    max_d = Fraction(0)
    for _, v, l in allv:
        d = diameter(space, v)
        max_d = max(max_d, d)
        if not d < delta:
            diam_bad.append({"V": l, "diameter": format_rational(d)})
    prop_ii = {"passed": not diam_bad, "max_diameter": format_rational(max_d), "violators": diam_bad}

    iii_bad = []
    max_c = 0
    max_literal = 0
    for _, v, l in allv:
        hits = intersecting_not_contained(v, u_cover)
        max_c = max(max_c, len(hits))
        max_literal = max(max_literal, sum(1 for u in u_cover.elements if u.interior & v.interior))
        if len(hits) > k:
            iii_bad.append({"V": l, "U": [u_cover.labels[i] for i in hits]})
    prop_iii = {"passed": not iii_bad, "max_count": max_c, "k": k,
                "max_meeting_count": max_literal, "violators": iii_bad}

    iv_bad = []
    worst = []
    for j, g in enumerate(grades):
        lower = [v for gg in grades[: j + 1] for v in gg.elements]
        bound = 2 ** (j + 1) - 1
        top = 0
        for v0, l in zip(g.elements, g.labels):
            c = sum(1 for v in lower if v.interior & v0.interior)
            top = max(top, c)
            if c > bound:
                iv_bad.append({"V": l, "grade": j, "count": c, "bound": bound})
        worst.append({"grade": j, "max_count": top, "bound": bound})
    prop_iv = {"passed": not iv_bad, "per_grade": worst, "violators": iv_bad}

    v_bad = []
    for j, g in enumerate(grades):
        for (a, la), (b, lb) in combinations(zip(g.elements, g.labels), 2):
            if a.key != b.key and a.closure & b.closure:
                v_bad.append({"grade": j, "pair": [la, lb]})
    prop_v = {"passed": not v_bad, "violators": v_bad}

    vi_bad = []
    for j, g in enumerate(grades):
        keys = g.keys()
        for gi, h in enumerate(action.group.elements):
            for v, l in zip(g.elements, g.labels):
                if translate(h, v).key not in keys:
                    vi_bad.append({"grade": j, "g": gi, "V": l})
    prop_vi = {"passed": not vi_bad, "violators": vi_bad}

    # regular-open in the sampled model: V = {φ > ε} and cl V = {φ >= ε} for the
    # distance-to-complement φ of the element it was shrunk from; the interior of
    # the closed level set {φ >= ε} is the strict one.
    vii_bad = []
    for j, g in enumerate(grades):
        for v, l, src in zip(g.elements, g.labels, sources[j]):
            if shrink_element(src, eps).key != v.key:
                vii_bad.append({"V": l})
    prop_vii = {"passed": not vii_bad, "violators": vii_bad}

    return {
        "i_cover": prop_i,
        "ii_diameter": prop_ii,
        "iii_meets_U": prop_iii,
        "iv_self_intersections": prop_iv,
        "v_disjoint_closures": prop_v,
        "vi_invariance": prop_vi,
        "vii_regular_open": prop_vii,
    }


# ---------------------------------------------------------------------------


@dataclass
class Prop32Result:
    delta: Fraction
    v_f: Cover
    beta: list[SampledSet]
    report: dict


def _f_subset_violations(u_cover: Cover, action: Action) -> list:
    return gcover_check(u_cover, action).witnesses


def _f_cover_of_balls(space: FiniteMetricSpace, action: Action, radius: Fraction) -> Cover:
    """An F-cover refining {B(z, radius)}: intersect with orbit-disjoint balls, then symmetrize."""
    grid = _radius_grid(space.rho, radius)
    c_sets = []
    for z in range(space.n):
        r = _pick_radius(space, grid, lambda r, z=z: _orbit_disjoint(space, action, z, r), z)
        if r is None:
            raise ResolutionError(f"no orbit-disjoint ball at {space.points[z]!r}")
        b = SampledSet(space, *space.ball_masks(z, r))
        c_sets.append(intersect(b, SampledSet(space, *space.ball_masks(z, radius))))
    seen = {}
    for z in range(space.n):
        w = whole(space)
        for g in action.group.elements:
            w = intersect(w, translate(inverse(g), c_sets[g[z]]))
        seen.setdefault(w.key, (w, f"B_{space.points[z]}"))
    return Cover(space, [w for w, _ in seen.values()], [l for _, l in seen.values()])


def proposition_32_partial(space, action: Action, u_cover: Cover, alpha: list[SampledSet], n: int,
                           m_cap: int | None = None, cap: int | None = None,
                           orbit_baseline: bool = False) -> Prop32Result:
    """delta selection, the order-independent F-refinement 𝒱_F, and a candidate β.

    Conclusion (1) is certified; conclusion (2) is only measured, since the
    general-position completion of β is not constructed here.
    """
    space = _require_metric(space)
    m_cap = Caps.from_env().m_cap if m_cap is None else m_cap
    if len(alpha) != len(u_cover):
        raise InputError("alpha needs one set per element of the collection")
    bad = _f_subset_violations(u_cover, action)
    if bad:
        raise PreconditionError("collection is not an F-equivariant family of F-subsets", witness=bad)
    for a, u, l in zip(alpha, u_cover.elements, u_cover.labels):
        if not is_subset(a.closure, u.interior):
            raise PreconditionError(f"closure of alpha({l}) is not inside {l}", witness=l)

    bound = INF
    for a, u in zip(alpha, u_cover.elements):
        for z in bits(a.closure):
            d = dist_to_complement(space, u, space.points[z])
            if d is not INF and (bound is INF or d < bound):
                bound = d
    if bound is INF:
        delta = max(diameter(space, whole(space)), space.rho)
    else:
        delta = largest_grid_below(bound, m_cap)
        if delta is None:
            raise ResolutionError("no grid delta below the separation bound")
    radius = delta / 3
    if radius < space.rho:
        raise ResolutionError(
            f"delta/3 = {format_rational(radius)} is below rho = {format_rational(space.rho)}"
        )
    balls = _f_cover_of_balls(space, action, radius)
    ref = equivariant_refine(balls, action, n, cap=cap)
    v_f = ref.cover

    beta = []
    for a in alpha:
        b = a
        for v in v_f.elements:
            if v.closure & a.closure:
                b = union(b, v)
        beta.append(b)

    chain_ok = []
    for a, b, u, l in zip(alpha, beta, u_cover.elements, u_cover.labels):
        ok = (is_subset(a.interior, a.closure) and is_subset(a.closure, b.interior)
              and is_subset(b.interior, b.closure) and is_subset(b.closure, u.interior))
        chain_ok.append({"U": l, "passed": ok})
    conclusion2_bad = []
    size = n + 2
    if len(beta) >= size:
        for combo in combinations(range(len(beta)), size):
            common = space.full_mask
            for i in combo:
                common &= beta[i].boundary
            if common:
                conclusion2_bad.append([u_cover.labels[i] for i in combo])
    delta_ok = all(
        d is INF or d > delta
        for a, u in zip(alpha, u_cover.elements)
        for d in (dist_to_complement(space, u, space.points[z]) for z in bits(a.closure))
    )
    beta_equivariant = None
    keys = {e.key for e in u_cover.elements}
    index_of = {e.key: i for i, e in enumerate(u_cover.elements)}
    beta_equivariant = all(
        translate(g, beta[i]).key == beta[index_of[translate(g, u).key]].key
        for g in action.group.elements
        for i, u in enumerate(u_cover.elements)
        if translate(g, u).key in keys
    )
    dim_vf = dimension(v_f)
    report = {
        "delta": format_rational(delta),
        "delta_separates": delta_ok,
        "ball_radius": format_rational(radius),
        "group_order": action.group.order,
        "n": n,
        "dim_v_f": dim_vf,
        "dim_v_f_le_n": dim_vf <= n,
        "v_f_refines_balls": is_refinement(v_f, balls)[0],
        "v_f_is_f_cover": gcover_check(v_f, action).is_gcover,
        "v_f_max_diameter": format_rational(max(diameter(space, v) for v in v_f.elements)),
        "conclusion_1": {"passed": all(c["passed"] for c in chain_ok), "per_U": chain_ok},
        "conclusion_2_empirical": {
            "holds": not conclusion2_bad,
            "violating_families": conclusion2_bad,
            "claimed": False,
        },
        "beta_equivariant": beta_equivariant,
    }
    if orbit_baseline:
        try:
            report["orbit_cover_dim"] = orbit_cover_dimension(space, action, radius, cap)
        except CapError as exc:
            report["orbit_cover_dim"] = None
            report["orbit_cover_note"] = str(exc)
    return Prop32Result(delta, v_f, beta, report)


def orbit_cover_dimension(space: FiniteMetricSpace, action: Action, radius: Fraction,
                          cap: int | None = None) -> int:
    """dim of F·𝒱 for a least-order (non-equivariant) refinement 𝒱 of the radius-balls.

    This is the older route whose order grows with |F|; reported for comparison.
    """
    from .group import PermGroup
    from .refine import refine_in_quotient

    balls = Cover(space, [SampledSet(space, *space.ball_masks(z, radius)) for z in range(space.n)])
    plain = refine_in_quotient(balls.deduplicated(), space.n, cap)
    orbit = {}
    for g in action.group.elements:
        for v in plain.elements:
            t = translate(g, v)
            orbit.setdefault(t.key, t)
    return dimension(Cover(space, list(orbit.values())))
