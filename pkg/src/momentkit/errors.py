"""Exception types shared across the package."""


class MomentKitError(Exception):
    """Base class for all package errors."""


class InsufficientMoments(MomentKitError):
    """A moment window is too short for the requested operation."""


class ShapeError(MomentKitError):
    """A matrix/determinant layout is not square or otherwise malformed."""


class DegenerateInput(MomentKitError):
    """Input violates a simplicity/positivity guarantee the theory promises."""


class DomainError(MomentKitError):
    """An interval or sequence is outside the operation's domain."""


class NotAMomentSequence(MomentKitError):
    """The sequence admits no representing measure on the requested domain."""


class NotStrictlyPositive(MomentKitError):
    """An operation requiring strict positivity received a non-strict input."""


class ConvergenceError(MomentKitError):
    """An iterative limit failed to converge within its iteration cap."""


class OutOfRange(MomentKitError):
    """A parameter lies outside the admissible open interval."""


class InfeasibleChoice(MomentKitError):
    """A prescribed extension value does not exceed its running threshold."""

    def __init__(self, message, level=None, threshold=None):
        super().__init__(message)
        self.level = level
        self.threshold = threshold


class ArityError(MomentKitError):
    """The number of supplied free values does not match the open slots."""


class BadIndex(MomentKitError):
    """A requested atom-count index is outside its admissible range."""


class PreconditionError(MomentKitError):
    """A structural precondition (monotonicity, flatness, ...) fails."""


class Unsupported(MomentKitError):
    """The input class is outside the supported (finitely describable) data."""


class CertificateInvalid(MomentKitError):
    """A completion certificate failed re-verification."""

    def __init__(self, message, identity=None):
        super().__init__(message)
        self.identity = identity


class ZeroAtomError(MomentKitError):
    """A reciprocal integral was requested for a measure with mass at zero."""
