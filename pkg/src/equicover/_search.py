"""Branch-and-bound search for a least-order refinement.

The search is shared by the poset covering dimension and by the refinement
step in the quotient. Input is, per point ``q``, the list of *atoms*
``(container, interior, closure)``: smallest admissible open pieces containing
``q`` that fit inside the given container. Pieces placed in the same container
are merged (merging never raises multiplicity), so a candidate refinement has
at most one element per container.
"""

from __future__ import annotations

from .errors import CapError

DEFAULT_NODE_CAP = 400_000


def node_cap() -> int:
    from .caps import Caps

    return Caps.from_env().search_nodes


def _order(state: dict, n: int) -> tuple[int, int]:
    counts = [0] * n
    for interior, _ in state.values():
        m = interior
        while m:
            low = m & -m
            counts[low.bit_length() - 1] += 1
            m ^= low
    return (max(counts) - 1 if state else -1), len(state)


def min_multiplicity_family(n: int, atoms_by_point, cap: int | None = None):
    """Return ``(dim, family)`` minimizing (dim, element count).

    Among families tied on both, the first one met in the fixed enumeration
    order wins (points in index order; for each point, pieces in already used
    containers first, then smaller pieces, then lower container index).

    ``family`` is a tuple of ``(container, interior, closure)`` sorted by key.
    Raises CapError when a point has no atom or the node budget runs out.
    """
    cap = node_cap() if cap is None else cap
    for q, atoms in enumerate(atoms_by_point):
        if not atoms:
            raise CapError(f"point {q} has no admissible piece", witness=q)
    best: list = [None]
    seen: set = set()
    nodes = [0]
    full = (1 << n) - 1

    def rec(state: dict, covered: int):
        nodes[0] += 1
        if nodes[0] > cap:
            raise CapError(f"search exceeded node cap {cap}")
        frozen = frozenset(state.items())
        if frozen in seen:
            return
        seen.add(frozen)
        dim, count = _order(state, n)
        # completions never lower dim or count, so only a strictly better
        # (dim, count) is worth pursuing; ties keep the first family found
        if best[0] is not None and (dim, count) >= best[0][:2]:
            return
        if covered == full:
            best[0] = (dim, count, dict(state))
            return
        uncovered = full & ~covered
        q = (uncovered & -uncovered).bit_length() - 1
        options = sorted(
            atoms_by_point[q],
            key=lambda a: (a[0] not in state, a[1].bit_count(), a[0], a[1], a[2]),
        )
        for container, interior, closure in options:
            cur = state.get(container)
            if cur is not None:
                new = (cur[0] | interior, cur[1] | closure)
            else:
                new = (interior, closure)
            nxt = dict(state)
            nxt[container] = new
            rec(nxt, covered | new[0])

    rec({}, 0)
    dim, _count, state = best[0]
    fam = sorted({(i, c): k for k, (i, c) in state.items()}.items())
    family = tuple((k, i, c) for (i, c), k in fam)
    dim, _ = _order({k: (i, c) for k, i, c in family}, n)
    return dim, family
