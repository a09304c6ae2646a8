"""Completely alternating sequences and their backward extensions.

A finite sequence has a completely alternating extension exactly when its
increments form a moment sequence on [0, 1]; the representing measure of the
extension lives on [0, 1] and must be split into a possible atom at zero
plus an atomic part on (0, 1], because the downstream criteria integrate 1/t
and are blind to mass at zero only in the controlled way the backward
extension formula prescribes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DegenerateInput, DomainError, NotAMomentSequence, ZeroAtomError
from .measure import AtomicMeasure, ZERO_MEASURE, tilt
from .numeric import Scalar
from .positivity import (PositivityClass, _values, classify_compact,
                         recover_support_and_masses)
from .principal import PrincipalKind, measure_from_poly, principal_polynomial


@dataclass(frozen=True)
class CAMeasure:
    """Measure on [0, 1]: optional mass at zero plus an atomic part on
    (0, 1]."""

    zero_mass: Scalar
    positive: AtomicMeasure

    def __init__(self, zero_mass: Scalar, positive: AtomicMeasure = ZERO_MEASURE):
        if not isinstance(zero_mass, float):
            zero_mass = Fraction(zero_mass)
        if zero_mass < 0:
            raise DegenerateInput("mass at zero must be nonnegative")
        for pos, _ in positive.atoms:
            if pos > 1:
                raise DegenerateInput("atoms must lie in (0, 1]")
        object.__setattr__(self, "zero_mass", zero_mass)
        object.__setattr__(self, "positive", positive)

    def total_mass(self) -> Scalar:
        return self.zero_mass + self.positive.total_mass()

    def moment(self, k: int) -> Scalar:
        """t^k integral over [0, 1]; negative k requires no mass at zero."""
        if k == 0:
            return self.total_mass()
        if k < 0 and self.zero_mass != 0:
            raise ZeroAtomError("reciprocal integral of a measure with mass at zero")
        return self.positive.moment(k)

    def geometric_sum(self, n: int) -> Scalar:
        """Integral of 1 + t + ... + t^(n-1)."""
        total = Fraction(0)
        if n >= 1:
            total += self.zero_mass
        for k in range(n):
            total += self.positive.moment(k)
        return total

    def scaled(self, factor: Scalar) -> "CAMeasure":
        pos = AtomicMeasure([(p, m * factor) for p, m in self.positive.atoms],
                            exact=self.positive.exact)
        return CAMeasure(self.zero_mass * factor, pos)

    def to_json(self) -> dict:
        from .numeric import format_scalar
        out = self.positive.to_json()
        if self.zero_mass != 0:
            out["zero_mass"] = format_scalar(self.zero_mass)
        return out


ZERO_CA_MEASURE = CAMeasure(0, ZERO_MEASURE)


@dataclass(frozen=True)
class CAExtensionVerdict:
    has_extension: bool
    measure: Optional[CAMeasure] = None
    increment_class: Optional[PositivityClass] = None


def _split_pairs(pairs) -> CAMeasure:
    zero_mass = Fraction(0)
    atoms = []
    for pos, mass in pairs:
        if pos == 0:
            zero_mass += mass
        else:
            atoms.append((pos, mass))
    return CAMeasure(zero_mass, AtomicMeasure(atoms))


def _minimal_zero_free(deltas) -> CAMeasure:
    """Minimal-index representing measure of a strictly positive increment
    window on [0, 1], choosing the principal measure that avoids zero."""
    n = len(deltas) - 1
    kind = PrincipalKind.LOWER if n % 2 == 1 else PrincipalKind.UPPER
    poly = principal_polynomial(deltas, Fraction(0), Fraction(1), kind)
    mu = measure_from_poly(poly, deltas, Fraction(0), Fraction(1))
    return CAMeasure(0, mu)


def has_ca_extension(c: Sequence[Scalar]) -> CAExtensionVerdict:
    """Does (c_0, ..., c_n) start a completely alternating sequence?
    On success carries a minimal-index representing measure of the
    increments (zero-free whenever a zero-free minimal one exists)."""
    values = _values(c)
    deltas = [values[k + 1] - values[k] for k in range(len(values) - 1)]
    if not deltas:
        return CAExtensionVerdict(True, ZERO_CA_MEASURE, None)
    if any(d < 0 for d in deltas):
        return CAExtensionVerdict(False, None, PositivityClass.NOT_POSITIVE)
    verdict = classify_compact(deltas, Fraction(0), Fraction(1))
    if verdict.kind is PositivityClass.NOT_POSITIVE:
        return CAExtensionVerdict(False, None, verdict.kind)
    if verdict.kind is PositivityClass.SINGULARLY_POSITIVE:
        pairs = recover_support_and_masses(deltas, Fraction(0), Fraction(1))
        return CAExtensionVerdict(True, _split_pairs(pairs), verdict.kind)
    return CAExtensionVerdict(True, _minimal_zero_free(deltas), verdict.kind)


def ca_scale(c: Sequence[Scalar], factor: Scalar):
    """Scale a completely alternating-extendable sequence; the representing
    measures scale by the same factor."""
    if not factor > 0:
        raise DomainError("scaling factor must be positive")
    return tuple(factor * v for v in _values(c))


@dataclass(frozen=True)
class CABackwardResult:
    ok: bool
    rho: Optional[CAMeasure] = None
    violated: Optional[str] = None

    @property
    def zero_mass_is_zero(self) -> Optional[bool]:
        if self.rho is None:
            return None
        return self.rho.zero_mass == 0


def ca_backward_extend(c: Sequence[Scalar], prefix: Sequence[Scalar],
                       tau: Optional[CAMeasure] = None) -> CABackwardResult:
    """Check/construct the backward extension (prefix..., c_0, ..., c_n).

    `prefix` lists the new values in ascending index order, deepest first:
    (c_{-r}, ..., c_{-1}).  `tau` is a representing measure on (0, 1] of some
    completely alternating extension of c (defaults to the recovered minimal
    one); a measure with mass at zero is rejected because every interior
    condition integrates a negative power.

    Interior slots must satisfy  c_{-k} = c_{-k-1} + integral t^-(k+1) dtau,
    the deepest slot the matching inequality; the representing measure of
    the extension is then t^-r dtau plus the slack at zero.
    """
    values = _values(c)
    prefix = [v if isinstance(v, float) else Fraction(v) for v in prefix]
    if not prefix:
        raise DomainError("empty prefix")
    r = len(prefix)
    if tau is None:
        verdict = has_ca_extension(values)
        if not verdict.has_extension:
            raise NotAMomentSequence("base sequence has no completely alternating extension")
        tau = verdict.measure
    if tau.zero_mass != 0:
        raise ZeroAtomError("supplied representing measure has mass at zero")

    ext = {-k: prefix[r - k] for k in range(1, r + 1)}
    ext[0] = values[0]
    # interior equalities: c_{-k} = c_{-k-1} + integral t^-(k+1)
    for k in range(0, r - 1):
        expected = ext[-(k + 1)] + tau.moment(-(k + 1))
        if ext[-k] != expected:
            return CABackwardResult(
                False, violated=f"slot {-k}: expected {expected}, given {ext[-k]}")
    bound = ext[-r] + tau.moment(-r)
    if ext[-(r - 1)] < bound:
        return CABackwardResult(
            False, violated=f"slot {-(r - 1)}: needs at least {bound}, given {ext[-(r - 1)]}")
    slack = ext[-(r - 1)] - bound
    rho = CAMeasure(slack, tilt(tau.positive, -r) if tau.positive.atoms else ZERO_MEASURE)
    return CABackwardResult(True, rho)
