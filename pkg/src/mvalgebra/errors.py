"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class MVError(Exception):
    """Base class for every error raised by this package."""


class ModeMismatch(MVError):
    pass


class PoleOverflow(MVError):
    """A product produced an hbar-exponent below the admitted pole bound.

    Raise the pole bound ``P`` of the ring mode.
    """


class NotInMaximalIdeal(MVError):
    pass


class BasisMismatch(MVError):
    pass


class TruncationOverflow(MVError):
    """A symmetric-algebra word exceeded the truncation length ``D``.

    Raise ``D``; the computation needs longer words than are represented.
    """


class NotConilpotent(MVError):
    pass


class AxiomViolation(MVError):
    def __init__(self, axiom: str, witness=None):
        super().__init__(f"axiom violated: {axiom}" + (f" ({witness})" if witness is not None else ""))
        self.axiom = axiom
        self.witness = witness


class NotLin0(MVError):
    pass


class ConvergenceGuardExceeded(MVError):
    pass


class NotBialgebra(MVError):
    pass


class NotSymmetricFlavor(MVError):
    pass


class BlockSumMismatch(MVError):
    pass


class NotAnUnshuffle(MVError):
    pass


class NotASolution(MVError):
    pass


class NotAMorphism(MVError):
    pass


class NotPrimitive(MVError):
    pass


class NotDegreeZero(MVError):
    pass


class SchemaError(MVError):
    """Malformed JSON input."""
