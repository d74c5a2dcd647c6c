"""Equivariant covers on finite models: posets and sampled metric spaces."""

from .caps import Caps
from .cover import Cover, dimension, gcover_check, is_refinement, smallness_check
from .errors import (
    CapError,
    CertificateError,
    EquicoverError,
    InputError,
    InvalidActionError,
    PreconditionError,
    QuotientNotT0Error,
    ResolutionError,
)
from .group import Action, PermGroup, dimension_equality_check, orbits, quotient
from .metric import FiniteMetricSpace, ball, cycle_space, diameter
from .nerve import (
    SimplicialComplex,
    barycentric_subdivision,
    canonical_cover,
    canonical_cover_check,
    nerve,
    nerve_map,
    pull_back_canonical,
)
from .pipeline import cover_of_z, hypothesis_check, proposition_32_partial, proposition_33, shrink
from .poset import FinitePoset, covering_dimension, minimal_open
from .rational import INF
from .refine import equivariant_refine
from .sets import SampledSet

__version__ = "0.1.0"
