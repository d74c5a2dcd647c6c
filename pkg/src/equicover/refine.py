"""Equivariant refinement of an F-cover through the quotient.

Project the cover to F\\Z, refine it there to order <= n, then pull back and
cut with translates of chosen cover elements:
``W = {π⁻¹(V) ∩ h·U_V : V ∈ 𝒱, h ∈ F}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._bits import bits, is_subset
from ._search import min_multiplicity_family
from .cover import Cover, dimension, gcover_check, is_refinement
from .errors import CertificateError, PreconditionError, ResolutionError
from .group import Action, QuotientSpace, quotient
from .metric import FiniteMetricSpace
from .poset import FinitePoset
from .sets import SampledSet, intersect, translate


@dataclass
class RefinementPlan:
    quotient: QuotientSpace
    projected: Cover
    refinement: Cover
    selection: list[int]  # index into the source cover, one per element of ``refinement``


@dataclass
class EquivariantRefinement:
    cover: Cover
    provenance: list[tuple[int, int]]  # (index of V, index of h in the group listing)
    plan: RefinementPlan
    source: Cover
    action: Action
    checks: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return dimension(self.cover)


def project_cover(cover: Cover, action: Action, q: QuotientSpace | None = None) -> Cover:
    """π(𝒰), deduplicated extensionally (first label kept)."""
    q = quotient(action) if q is None else q
    images = {}
    for label, u in zip(cover.labels, cover.elements):
        images.setdefault(q.project(u).key, (q.project(u), f"pi({label})"))
    return Cover(q.space, [e for e, _ in images.values()], [l for _, l in images.values()])


def metric_radii(space: FiniteMetricSpace) -> list[Fraction]:
    """One radius per distinct ball shape with radius >= rho."""
    rho = space.rho
    ds = [d for d in space.distance_values() if d >= rho]
    radii = {rho}
    radii.update(ds)
    for a, b in zip(ds, ds[1:]):
        radii.add((a + b) / 2)
    if ds:
        radii.add(ds[-1] + rho)
    return sorted(radii)


def _atoms(cover: Cover) -> list[list[tuple[int, int, int]]]:
    space = cover.space
    n = space.n
    atoms: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    if isinstance(space, FinitePoset):
        for q in range(n):
            uq = space.up[q]
            cl = space.down_closure(uq)
            for p, elem in enumerate(cover.elements):
                if elem.interior >> q & 1:
                    atoms[q].append((p, uq, cl))
        return atoms
    if isinstance(space, FiniteMetricSpace):
        balls = {}
        for c in range(n):
            for r in metric_radii(space):
                balls.setdefault(space.ball_masks(c, r), None)
        for p, elem in enumerate(cover.elements):
            pieces = {}
            for inner, outer in balls:
                piece = inner & elem.interior
                if piece:
                    pieces.setdefault((piece, outer & elem.closure), None)
            # only inclusion-minimal pieces around each point: any union of larger
            # pieces contains a union of minimal ones in the same containers, which
            # is no worse in multiplicity or element count
            for q in range(n):
                around = [pc for pc in pieces if pc[0] >> q & 1]
                for inner, outer in around:
                    if not any(
                        (i2, o2) != (inner, outer) and is_subset(i2, inner) and is_subset(o2, outer)
                        for i2, o2 in around
                    ):
                        atoms[q].append((p, inner, outer))
        return atoms
    raise TypeError(f"unsupported space {type(space).__name__}")


def refine_in_quotient(projected: Cover, n: int, cap: int | None = None) -> Cover:
    """Least-order refinement of ``projected`` among opens of the searchable family.

    Posets: unions of minimal opens. Metric spaces: unions of balls with radius
    >= rho, each clipped to the element it is placed in. Ties go to fewer elements, then to the lexicographically least family.
    """
    space = projected.space
    atoms = _atoms(projected)
    missing = [space.points[q] for q, a in enumerate(atoms) if not a]
    if missing:
        raise ResolutionError(
            f"unachievable at this resolution: no admissible open around {missing}", witness=missing
        )
    best_dim, family = min_multiplicity_family(space.n, atoms, cap)
    elements = [SampledSet(space, i, c) for _, i, c in family]
    result = Cover(space, elements, [f"V{j}" for j in range(len(elements))])
    if best_dim > n:
        raise ResolutionError(
            f"unachievable at this resolution: best refinement has dimension {best_dim} > {n}",
            witness={"best_dim": best_dim, "best": [list(space.ids(e.interior)) for e in elements]},
        )
    return result


def _select(plan_v: Cover, projected_src: list[SampledSet], rule: str) -> list[int]:
    selection = []
    for v in plan_v.elements:
        options = [i for i, pu in enumerate(projected_src) if is_subset(v.interior, pu.interior)]
        if not options:
            raise CertificateError("refinement element not inside any projected element")
        selection.append(options[0] if rule == "least" else options[-1])
    return selection


def equivariant_refine(cover: Cover, action: Action, n: int, selection: str = "least",
                       cap: int | None = None) -> EquivariantRefinement:
    """Open F-refinement of an F-cover with dimension <= n, with all postconditions checked."""
    if selection not in ("least", "greatest"):
        raise ValueError("selection must be 'least' or 'greatest'")
    if not cover.is_cover:
        missing = cover.space.ids(cover.space.full_mask & ~cover.union_interior)
        raise PreconditionError(f"not a cover: {list(missing)} uncovered", witness=list(missing))
    report = gcover_check(cover, action)
    if not report.is_gcover:
        raise PreconditionError("input is not an F-cover", witness=report.witnesses)

    q = quotient(action)
    projected = project_cover(cover, action, q)
    v_cover = refine_in_quotient(projected, n, cap)
    images = [q.project(u) for u in cover.elements]
    chosen = _select(v_cover, images, selection)
    plan = RefinementPlan(q, projected, v_cover, chosen)

    found: dict = {}
    for vi, v in enumerate(v_cover.elements):
        pre = q.preimage(v)
        u = cover.elements[chosen[vi]]
        for hi, h in enumerate(action.group.elements):
            w = intersect(pre, translate(h, u))
            if w.is_empty:
                continue
            found.setdefault(w.key, (w, (vi, hi)))
    elements = [w for w, _ in found.values()]
    provenance = [p for _, p in found.values()]
    labels = [f"W{vi}.{hi}" for vi, hi in provenance]
    result = EquivariantRefinement(Cover(cover.space, elements, labels), provenance, plan, cover, action)
    result.checks = certify_refinement(result, n)
    failed = [k for k, v in result.checks.items() if v is False]
    if failed:
        raise CertificateError(f"refinement postconditions failed: {failed}", witness=result.checks)
    return result


def certify_refinement(result: EquivariantRefinement, n: int) -> dict:
    w = result.cover
    refines, _ = is_refinement(w, result.source)
    dim_w = dimension(w)
    dim_v = dimension(result.plan.refinement)
    return {
        "covers": w.is_cover,
        "refines": refines,
        "f_cover": gcover_check(w, result.action).is_gcover,
        "dim_w_le_dim_v": dim_w <= dim_v,
        "dim_v_le_n": dim_v <= n,
        "dim_w": dim_w,
        "dim_v": dim_v,
    }


def pi_z_injection_check(result: EquivariantRefinement, z) -> bool:
    """W ↦ π(W) on {W ∋ z} lands in {V ∋ π(z)} and is injective."""
    q = result.plan.quotient
    zi = q.source.index(z)
    pz = q.projection[zi]
    v_interiors = {v.interior for v in result.plan.refinement.elements}
    images = [q.project_mask(w.interior) for w in result.cover.elements if w.interior >> zi & 1]
    well_defined = all(img in v_interiors and img >> pz & 1 for img in images)
    return well_defined and len(set(images)) == len(images)


def pointwise_multiplicity_bound(result: EquivariantRefinement) -> bool:
    """mult_𝒲(z) <= mult_𝒱(π(z)) for every z."""
    q = result.plan.quotient
    mw = result.cover.multiplicities()
    mv = result.plan.refinement.multiplicities()
    return all(mw[z] <= mv[q.projection[z]] for z in range(q.source.n))
