"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class EquicoverError(Exception):
    exit_code = 1

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InputError(EquicoverError, ValueError):
    """Malformed input: bad JSON, unknown point ids, invalid structures."""

    exit_code = 2


class CapError(EquicoverError):
    """Instance too large for the exhaustive routines."""

    exit_code = 3


class ResolutionError(CapError):
    """The sampled model is too coarse for the requested construction."""


class PreconditionError(EquicoverError):
    """A hypothesis of a construction does not hold; ``witness`` names why."""

    exit_code = 4


class InvalidActionError(PreconditionError):
    pass


class QuotientNotT0Error(PreconditionError):
    pass


class CertificateError(EquicoverError):
    """A postcondition that should hold by construction failed."""

    exit_code = 5
