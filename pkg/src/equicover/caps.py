"""Size caps for the exhaustive routines, overridable through ``EQUICOVER_CAPS``.

The variable holds comma-separated ``name=value`` pairs, e.g.
``EQUICOVER_CAPS="poset_points=16,group_elements=720"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

from .errors import InputError


@dataclass(frozen=True)
class Caps:
    poset_points: int = 14
    group_elements: int = 120
    complex_dim: int = 4
    complex_simplices: int = 4096
    search_nodes: int = 400_000
    m_cap: int = 64
    nerve_elements: int = 64

    @classmethod
    def from_env(cls, env: str | None = None) -> "Caps":
        raw = os.environ.get("EQUICOVER_CAPS", "") if env is None else env
        caps = cls()
        if not raw.strip():
            return caps
        names = {f.name for f in fields(cls)}
        updates = {}
        for part in raw.split(","):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep or key not in names:
                raise InputError(f"bad EQUICOVER_CAPS entry {part!r}")
            try:
                updates[key] = int(value)
            except ValueError:
                raise InputError(f"bad EQUICOVER_CAPS value {part!r}") from None
        return replace(caps, **updates)
