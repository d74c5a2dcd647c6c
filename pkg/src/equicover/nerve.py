"""Simplicial complexes, barycentric subdivision, canonical star covers and nerves.

Open subsets of a realization |K| are handled combinatorially: a point of |K|
lies in the interior of exactly one simplex of bK, so an open set is a
coface-closed family of bK-simplices (chains of simplices of K).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Hashable, Iterable

from ._bits import bits, is_subset
from .caps import Caps
from .cover import Cover
from .errors import CapError, CertificateError, InputError
from .metric import FiniteMetricSpace, diameter, dist_to_complement
from .rational import INF
from .sets import SampledSet

Simplex = frozenset
Chain = tuple  # strictly increasing tuple of simplices


def _vkey(v):
    return (type(v).__name__, str(v)) if not isinstance(v, int) else ("", f"{v:09d}")


def simplex_key(s: Simplex):
    return (len(s), sorted(_vkey(v) for v in s))


class SimplicialComplex:
    def __init__(self, simplices: Iterable[Iterable[Hashable]]):
        faces: set = set()
        for s in simplices:
            s = frozenset(s)
            if not s:
                continue
            if s in faces:
                continue
            items = list(s)
            for r in range(1, len(items) + 1):
                for f in combinations(items, r):
                    faces.add(frozenset(f))
        self.simplices = tuple(sorted(faces, key=simplex_key))
        self.vertices = tuple(
            sorted((next(iter(s)) for s in self.simplices if len(s) == 1), key=_vkey)
        )
        self._set = faces

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def __contains__(self, s) -> bool:
        return frozenset(s) in self._set

    def __len__(self):
        return len(self.simplices)

    def of_dim(self, j: int) -> list[Simplex]:
        return [s for s in self.simplices if len(s) == j + 1]

    def f_vector(self) -> list[int]:
        return [len(self.of_dim(j)) for j in range(self.dim + 1)]

    def faces(self, s: Simplex) -> list[Simplex]:
        return [t for t in self.simplices if t <= s]

    def __repr__(self):
        return f"SimplicialComplex(dim={self.dim}, f={self.f_vector()})"


def simplex(vertices: Iterable[Hashable]) -> SimplicialComplex:
    return SimplicialComplex([list(vertices)])


@dataclass
class Subdivision:
    original: SimplicialComplex
    complex: SimplicialComplex  # vertices are simplices of the original (barycenters)
    chains: tuple  # bK simplices as increasing chains

    def star(self, sigma: Simplex) -> "RealizationOpen":
        sigma = frozenset(sigma)
        return RealizationOpen(frozenset(c for c in self.chains if sigma in c))

    def closed_star_chains(self, sigma: Simplex) -> frozenset:
        """bK simplices in the closure of the open star: chains comparable to sigma throughout."""
        sigma = frozenset(sigma)
        return frozenset(c for c in self.chains if all(t <= sigma or sigma <= t for t in c))


@dataclass(frozen=True)
class RealizationOpen:
    """A coface-closed set of bK simplices, i.e. a union of open simplex interiors."""

    chains: frozenset

    def __and__(self, other: "RealizationOpen") -> "RealizationOpen":
        return RealizationOpen(self.chains & other.chains)

    def __bool__(self):
        return bool(self.chains)


def is_coface_closed(sub: Subdivision, chains: frozenset) -> bool:
    for c in chains:
        cs = set(c)
        for d in sub.chains:
            if cs <= set(d) and d not in chains:
                return False
    return True


def barycentric_subdivision(k: SimplicialComplex) -> Subdivision:
    """bK: vertices are the simplices of K, simplices are the chains σ0 ⊂ σ1 ⊂ ..."""
    simplices = list(k.simplices)  # sorted by size, so chains come out increasing
    chains: list[tuple] = []

    def extend(chain: tuple, start: int):
        chains.append(chain)
        top = chain[-1]
        for i in range(start, len(simplices)):
            s = simplices[i]
            if len(s) > len(top) and top < s:
                extend(chain + (s,), i + 1)

    for i, s in enumerate(simplices):
        extend((s,), i + 1)
    chains.sort(key=lambda c: (len(c), [simplex_key(s) for s in c]))
    bk = SimplicialComplex.__new__(SimplicialComplex)
    bk.simplices = tuple(frozenset(c) for c in chains)
    bk.vertices = tuple(simplices)
    bk._set = set(bk.simplices)
    return Subdivision(k, bk, tuple(chains))


@dataclass
class CanonicalCover:
    subdivision: Subdivision
    grades: list[list[tuple[Simplex, RealizationOpen]]]

    def all_elements(self) -> list[tuple[Simplex, RealizationOpen]]:
        return [e for g in self.grades for e in g]


def canonical_cover(k: SimplicialComplex) -> CanonicalCover:
    """C^j = {st_bK(σ̂) : dim σ = j}."""
    sub = barycentric_subdivision(k)
    grades = [[(s, sub.star(s)) for s in k.of_dim(j)] for j in range(k.dim + 1)]
    return CanonicalCover(sub, grades)


def _check_caps(k: SimplicialComplex, caps: Caps) -> None:
    if k.dim > caps.complex_dim:
        raise CapError(f"complex dimension {k.dim} > cap {caps.complex_dim}")
    if len(k) > caps.complex_simplices:
        raise CapError(f"{len(k)} simplices > cap {caps.complex_simplices}")


def canonical_cover_check(k: SimplicialComplex, caps: Caps | None = None) -> dict:
    """Enumerate: covering, same-grade disjointness, and the face-count bound per σ."""
    caps = Caps.from_env() if caps is None else caps
    _check_caps(k, caps)
    cc = canonical_cover(k)
    sub = cc.subdivision
    union = frozenset().union(*(o.chains for _, o in cc.all_elements())) if k.simplices else frozenset()
    covers = union == frozenset(sub.chains)
    disjoint = True
    disjoint_violations = []
    for j, grade in enumerate(cc.grades):
        for (s, a), (t, b) in combinations(grade, 2):
            if a & b:
                disjoint = False
                disjoint_violations.append([sorted(map(str, s)), sorted(map(str, t))])
    counts = []
    bound_ok = True
    exact = True
    comparable = True
    elements = cc.all_elements()
    for j, grade in enumerate(cc.grades):
        lower = [e for g in cc.grades[: j + 1] for e in g]
        for s, st in grade:
            hits = [t for t, o in lower if o & st]
            bound = 2 ** (j + 1) - 1
            counts.append({"sigma": sorted(map(str, s)), "count": len(hits), "bound": bound})
            bound_ok &= len(hits) <= bound
            exact &= len(hits) == bound
    for (s, a), (t, b) in combinations(elements, 2):
        if a & b and not (s <= t or t <= s):
            comparable = False
    coface_closed = all(is_coface_closed(sub, o.chains) for _, o in elements)
    return {
        "passed": covers and disjoint and bound_ok and comparable and coface_closed,
        "covers": covers,
        "same_grade_disjoint": disjoint,
        "bound_holds": bound_ok,
        "counts_exact": exact,
        "intersecting_stars_comparable": comparable,
        "stars_coface_closed": coface_closed,
        "counts": counts,
        "violations": disjoint_violations,
    }


def nerve(cover: Cover) -> SimplicialComplex:
    """Vertices are element indices; a simplex per subfamily with a common interior point."""
    tops = set()
    for z in range(cover.space.n):
        members = frozenset(i for i, e in enumerate(cover.elements) if e.interior >> z & 1)
        if members:
            tops.add(members)
    return SimplicialComplex(tops)


@dataclass(frozen=True)
class NervePoint:
    coords: tuple[Fraction, ...]  # one per cover element, summing to 1

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, c in enumerate(self.coords) if c > 0)

    def __getitem__(self, i):
        return self.coords[i]


def _weight(space: FiniteMetricSpace, w: SampledSet, z: int) -> Fraction:
    d = dist_to_complement(space, w, space.points[z])
    if d is INF:
        # an element equal to the whole space: any constant above every finite
        # distance keeps positivity and equivariance
        return diameter(space, SampledSet(space, space.full_mask, space.full_mask)) + 1
    return d


def nerve_map(cover: Cover, z) -> NervePoint:
    """f(z) = Σ_W d(z, Z∖W) / Σ_W' d(z, Z∖W') · [W], exactly."""
    space = cover.space
    if not isinstance(space, FiniteMetricSpace):
        raise InputError("nerve_map needs a metric space")
    zi = space.index(z)
    weights = [_weight(space, w, zi) for w in cover.elements]
    total = sum(weights, Fraction(0))
    if total == 0:
        raise InputError(f"point {space.points[zi]!r} lies in no interior")
    return NervePoint(tuple(Fraction(w) / total for w in weights))


def carrier_chain(p: NervePoint) -> tuple[frozenset, ...]:
    """Threshold sets {W : coord_W >= t} for the distinct positive coordinates, increasing."""
    levels = sorted({c for c in p.coords if c > 0}, reverse=True)
    return tuple(frozenset(i for i, c in enumerate(p.coords) if c >= t) for t in levels)


def in_open_star(p: NervePoint, sigma: frozenset) -> bool:
    return sigma in carrier_chain(p)


def in_closed_star(p: NervePoint, sigma: frozenset) -> bool:
    inside = [p.coords[i] for i in sigma]
    outside = [c for i, c in enumerate(p.coords) if i not in sigma]
    return min(inside) >= max(outside, default=Fraction(0))


@dataclass
class PullBack:
    cover: Cover
    nerve: SimplicialComplex
    grades: list[list[tuple[frozenset, SampledSet]]]
    points: list[NervePoint]
    checks: dict = field(default_factory=dict)

    def as_covers(self) -> list[Cover]:
        out = []
        for j, g in enumerate(self.grades):
            labels = [f"V{j}:" + ",".join(str(i) for i in sorted(s)) for s, _ in g]
            out.append(Cover(self.cover.space, [v for _, v in g], labels))
        return out

    def union(self) -> Cover:
        elems, labels = [], []
        for j, g in enumerate(self.grades):
            for s, v in g:
                elems.append(v)
                labels.append(f"V{j}:" + ",".join(str(i) for i in sorted(s)))
        return Cover(self.cover.space, elems, labels)


def pull_back_canonical(cover: Cover, caps: Caps | None = None) -> PullBack:
    """V̂^j = {f⁻¹(st σ̂) : dim σ = j}, decided pointwise by carrier chains.

    Interior membership is the open star (strict coordinate comparison), closure
    membership the closed star (non-strict), matching the sampled topology.
    """
    caps = Caps.from_env() if caps is None else caps
    if len(cover) > caps.nerve_elements:
        raise CapError(f"{len(cover)} cover elements > cap {caps.nerve_elements}")
    space = cover.space
    nv = nerve(cover)
    _check_caps(nv, caps)
    pts = [nerve_map(cover, z) for z in range(space.n)]
    chains = [set(carrier_chain(p)) for p in pts]
    grades = []
    for j in range(nv.dim + 1):
        grade = []
        for sigma in nv.of_dim(j):
            inner = 0
            outer = 0
            for z, p in enumerate(pts):
                if sigma in chains[z]:
                    inner |= 1 << z
                if in_closed_star(p, sigma):
                    outer |= 1 << z
            if inner:
                grade.append((sigma, SampledSet(space, inner, outer)))
        grades.append(grade)
    pb = PullBack(cover, nv, grades, pts)
    pb.checks = certify_pull_back(pb)
    failed = [k for k, v in pb.checks.items() if v is False]
    if failed:
        raise CertificateError(f"pull-back checks failed: {failed}", witness=pb.checks)
    return pb


def certify_pull_back(pb: PullBack) -> dict:
    space = pb.cover.space
    full = space.full_mask
    covered = 0
    for g in pb.grades:
        for _, v in g:
            covered |= v.interior
    refines = True
    witnesses = []
    for g in pb.grades:
        for sigma, v in g:
            # contained in every W whose vertex lies in sigma
            inside = [i for i in sigma if is_subset(v.interior, pb.cover.elements[i].interior)]
            if len(inside) != len(sigma):
                refines = False
            witnesses.append(min(inside) if inside else None)
    disjoint = all(
        not (a.interior & b.interior)
        for g in pb.grades
        for (_, a), (_, b) in combinations(g, 2)
    )
    bound = True
    for j, g in enumerate(pb.grades):
        lower = [v for gg in pb.grades[: j + 1] for _, v in gg]
        for _, v0 in g:
            if sum(1 for v in lower if v.interior & v0.interior) > 2 ** (j + 1) - 1:
                bound = False
    star_vertex = all(
        pb_star_vertex_ok(pb, i) for i in range(len(pb.cover))
    )
    return {
        "covers": covered == full,
        "refines": refines,
        "same_grade_disjoint": disjoint,
        "intersection_bound": bound,
        "vertex_star_preimage_is_W": star_vertex,
        "refinement_witness": witnesses,
    }


def pb_star_vertex_ok(pb: PullBack, i: int) -> bool:
    """f⁻¹(st[W_i]) = interior(W_i): support contains i iff z in the interior."""
    w = pb.cover.elements[i]
    pre = 0
    for z, p in enumerate(pb.points):
        if p.coords[i] > 0:
            pre |= 1 << z
    return pre == w.interior


def to_dot(k: SimplicialComplex, name: str = "K") -> str:
    """Graphviz rendering of the 1-skeleton."""
    def label(v):
        if isinstance(v, frozenset):
            return "{" + ",".join(sorted(map(str, v))) + "}"
        return str(v)

    lines = [f"graph {name} {{"]
    ids = {v: f"v{i}" for i, v in enumerate(k.vertices)}
    for v, vid in ids.items():
        lines.append(f'  {vid} [label="{label(v)}"];')
    for e in k.of_dim(1):
        a, b = sorted(e, key=lambda v: ids[v])
        lines.append(f"  {ids[a]} -- {ids[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
