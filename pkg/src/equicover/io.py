"""JSON loading and canonical dumping for spaces, groups, covers and complexes."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .cover import Cover
from .errors import InputError
from .group import PermGroup
from .metric import BallUnionSet, FiniteMetricSpace
from .nerve import SimplicialComplex
from .poset import FinitePoset
from .rational import INF, format_rational, parse_rational
from .sets import SampledSet, Space


def read_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_jsonable(obj):
    if obj is INF:
        return "inf"
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((to_jsonable(v) for v in obj), key=repr)
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    return obj


def _need(data, key, what):
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"{what}: missing key {key!r}")
    return data[key]


def space_from_dict(data) -> Space:
    """A metric space if ``dist`` is present, otherwise a poset."""
    if isinstance(data, dict) and "dist" in data:
        return metric_from_dict(data)
    return poset_from_dict(data)


def poset_from_dict(data) -> FinitePoset:
    points = _need(data, "points", "poset")
    pairs = data.get("leq", [])
    if not isinstance(points, list) or not isinstance(pairs, list):
        raise InputError("poset: 'points' and 'leq' must be lists")
    for p in pairs:
        if not isinstance(p, list) or len(p) != 2:
            raise InputError(f"poset: relation {p!r} is not a pair")
    return FinitePoset.from_relations([str(p) for p in points], [(str(a), str(b)) for a, b in pairs])


def poset_to_dict(space: FinitePoset) -> dict:
    return {"points": list(space.points), "leq": [list(r) for r in space.relations() if r[0] != r[1]]}


def metric_from_dict(data) -> FiniteMetricSpace:
    points = _need(data, "points", "metric space")
    dist = _need(data, "dist", "metric space")
    rho = _need(data, "rho", "metric space")
    if not isinstance(dist, list) or not all(isinstance(row, list) for row in dist):
        raise InputError("metric space: 'dist' must be a matrix")
    return FiniteMetricSpace([str(p) for p in points], [[parse_rational(v) for v in row] for row in dist], rho)


def metric_to_dict(space: FiniteMetricSpace) -> dict:
    return {
        "points": list(space.points),
        "dist": [[format_rational(v) for v in row] for row in space.dist],
        "rho": format_rational(space.rho),
    }


def space_to_dict(space: Space) -> dict:
    if isinstance(space, FiniteMetricSpace):
        return metric_to_dict(space)
    return poset_to_dict(space)


def group_from_dict(data, cap: int | None = None) -> PermGroup:
    degree = _need(data, "degree", "group")
    gens = data.get("generators", [])
    if not isinstance(degree, int) or degree < 0:
        raise InputError("group: 'degree' must be a nonnegative integer")
    if not isinstance(gens, list) or not all(isinstance(g, list) for g in gens):
        raise InputError("group: 'generators' must be a list of permutation words")
    return PermGroup(degree, gens, cap=cap)


def group_to_dict(group: PermGroup) -> dict:
    return {"degree": group.degree, "generators": [list(g) for g in group.generators]}


def set_from_descriptor(space: Space, desc) -> SampledSet:
    """One cover element from ``{"points"}``, ``{"balls"}`` or ``{"interior", "closure"}``."""
    if not isinstance(desc, dict):
        raise InputError(f"set descriptor must be an object, got {desc!r}")
    if "balls" in desc:
        if not isinstance(space, FiniteMetricSpace):
            raise InputError("ball descriptors need a metric space")
        balls = []
        for b in desc["balls"]:
            balls.append((space.index(str(_need(b, "c", "ball"))), parse_rational(_need(b, "r", "ball"))))
        return BallUnionSet(space, tuple(balls)).sampled()
    if "interior" in desc:
        interior = space.mask(str(p) for p in desc["interior"])
        closure = space.mask(str(p) for p in desc.get("closure", desc["interior"]))
        return SampledSet(space, interior, closure)
    if "points" in desc:
        pts = [str(p) for p in desc["points"]]
        if isinstance(space, FinitePoset):
            return space.open_region(pts)
        mask = space.mask(pts)
        return SampledSet(space, mask, mask)
    raise InputError(f"set descriptor needs 'points', 'balls' or 'interior': {desc!r}")


def set_to_descriptor(s: SampledSet, label: str | None = None) -> dict:
    out = {"interior": list(s.interior_members()), "closure": list(s.closure_members())}
    if label is not None:
        out["label"] = label
    return out


def cover_from_data(space: Space, data) -> Cover:
    items = data.get("elements") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise InputError("cover: expected a list of set descriptors or {'elements': [...]}")
    elems = [set_from_descriptor(space, d) for d in items]
    labels = [str(d.get("label", f"U{i}")) for i, d in enumerate(items)]
    return Cover(space, elems, labels)


def cover_to_dict(cover: Cover) -> dict:
    return {"elements": [set_to_descriptor(e, l) for e, l in zip(cover.elements, cover.labels)]}


def alpha_from_data(cover: Cover, data) -> list[SampledSet]:
    """The map U -> α(U), keyed by cover label; missing labels map to the empty set."""
    if not isinstance(data, dict):
        raise InputError("alpha: expected an object mapping labels to set descriptors")
    unknown = sorted(set(data) - set(cover.labels))
    if unknown:
        raise InputError(f"alpha: unknown labels {unknown}")
    space = cover.space
    out = []
    for l in cover.labels:
        out.append(set_from_descriptor(space, data[l]) if l in data else SampledSet(space, 0, 0))
    return out


def complex_from_dict(data) -> SimplicialComplex:
    simplices = _need(data, "simplices", "complex")
    if not isinstance(simplices, list) or not all(isinstance(s, list) and s for s in simplices):
        raise InputError("complex: 'simplices' must be a list of nonempty vertex lists")
    return SimplicialComplex([[str(v) for v in s] for s in simplices])


def complex_to_dict(k: SimplicialComplex) -> dict:
    return {"simplices": [sorted(map(str, s)) for s in k.simplices]}


def load_space(path) -> Space:
    return space_from_dict(read_json(path))


def load_group(path, cap: int | None = None) -> PermGroup:
    return group_from_dict(read_json(path), cap=cap)


def load_cover(space: Space, path) -> Cover:
    return cover_from_data(space, read_json(path))


def load_complex(path) -> SimplicialComplex:
    return complex_from_dict(read_json(path))


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
