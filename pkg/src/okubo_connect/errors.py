"""Exception types shared across modules."""

from .numerics import NoBranchError, PoleError  # noqa: F401


class OkuboError(Exception):
    pass


class StructureError(OkuboError):
    """Input matrices lack the required block/diagonal structure."""


class DegenerateFrame(OkuboError):
    pass


class SingularP(OkuboError):
    pass


class BlockStructureError(OkuboError):
    """The zero block needed for a reduction is not zero."""


class SchemeMismatch(OkuboError):
    pass


class ResonanceError(OkuboError):
    pass


class IllConditioned(OkuboError):
    pass


class OutsideDisk(OkuboError):
    pass


class TailTooLarge(OkuboError):
    pass


class UnreachableError(OkuboError):
    pass


class ClearanceError(OkuboError):
    pass


class ToleranceNotMet(OkuboError):
    pass


class MissingInput(OkuboError):
    pass


class DivergentIntegral(OkuboError):
    pass


class NoConvergence(OkuboError):
    pass


class ParseError(OkuboError):
    pass


class ValidationError(OkuboError):
    pass


class GiveUp(OkuboError):
    pass
