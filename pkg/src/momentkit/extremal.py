"""Extremal values of the reciprocal integral over representing measures.

For a strictly positive sequence the integral of 1/t over its representing
measures on [a, b] spans a closed interval whose endpoints are attained at
the two principal measures.  Both endpoint values are computed exactly from
the determinant identity

    integral of 1/t dmu  =  -P(0) / Q(0),      P(0) = sigma((Q(t)-Q(0))/t),

applied to the two principal polynomials, then ordered by comparison; this
sidesteps any orientation bookkeeping and stays rational even when the atoms
are irrational.

On (0, inf) the supremum is unbounded (witnessed constructively) and the
infimum is exact for odd top degree; for even top degree it is the floating
limit of the compact values over a geometrically growing right endpoint.
On (0, 1] the infimum is exact in both parities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ConvergenceError, DegenerateInput, NotStrictlyPositive
from .measure import AtomicMeasure
from .numeric import Polynomial, Scalar
from .positivity import PositivityClass, _values, classify_compact, classify_half_open, classify_ray
from .principal import PrincipalKind, bordered_hankel_poly, principal_polynomial

EVEN_LIMIT_REL_TOL = 1e-9
EVEN_LIMIT_MAX_Q = 40


@dataclass(frozen=True)
class ExtremalBounds:
    """Extremal reciprocal integrals and the measures attaining them.
    t_hi is math.inf (with attained_hi None) on unbounded domains."""

    t_lo: Scalar
    t_hi: Scalar
    attained_lo: Optional[AtomicMeasure] = None
    attained_hi: Optional[AtomicMeasure] = None


def reciprocal_value_from_poly(poly: Polynomial, values: Sequence[Scalar]) -> Scalar:
    """-P(0)/Q(0) for a polynomial vanishing at every atom of a measure
    whose leading moments are `values`; equals the measure's reciprocal
    integral.  Needs deg(poly) <= len(values) + 1 and Q(0) != 0."""
    q0 = poly.coeffs[0]
    if q0 == 0:
        raise DegenerateInput("atom polynomial vanishes at zero")
    quotient = poly.shifted_quotient_at_zero()
    if quotient.degree + 1 > len(values):
        raise DegenerateInput("moment window too short for the sigma functional")
    p0 = sum(c * values[j] for j, c in enumerate(quotient.coeffs))
    return -p0 / q0


def _principal_value(values, a, b, kind) -> Scalar:
    return reciprocal_value_from_poly(principal_polynomial(values, a, b, kind), values)


def compact_reciprocal_values(values, a, b):
    """(lower-principal value, upper-principal value) on [a, b]."""
    values = _values(values)
    return (_principal_value(values, a, b, PrincipalKind.LOWER),
            _principal_value(values, a, b, PrincipalKind.UPPER))


def reciprocal_extremes_compact(s, a: Scalar, b: Scalar,
                                with_measures: bool = True) -> ExtremalBounds:
    """Extremal reciprocal integrals over representing measures on [a, b],
    with the attaining principal measures attached."""
    values = _values(s)
    if not 0 < a < b:
        raise NotStrictlyPositive("need 0 < a < b")
    if classify_compact(values, a, b).kind is not PositivityClass.STRICTLY_POSITIVE:
        raise NotStrictlyPositive("sequence is not strictly positive on the interval")
    v_low, v_up = compact_reciprocal_values(values, a, b)
    if v_low == v_up:
        raise DegenerateInput("principal reciprocal values coincide")
    pairs = sorted([(v_low, PrincipalKind.LOWER), (v_up, PrincipalKind.UPPER)])
    measures = (None, None)
    if with_measures:
        from .principal import principal_compact
        measures = tuple(principal_compact(values, a, b, kind) for _, kind in pairs)
    return ExtremalBounds(pairs[0][0], pairs[1][0], measures[0], measures[1])


def _first_strict_interval(values, q_max=30):
    for q in range(1, q_max + 1):
        a, b = Fraction(1, 2 ** q), Fraction(2 ** q)
        if classify_compact(values, a, b).kind is PositivityClass.STRICTLY_POSITIVE:
            return a, b, q
    raise ConvergenceError("no strictly positive compact window found")


def _even_ray_limit(values) -> float:
    """Floating limit of the compact infimum as the right endpoint grows
    geometrically; per-interval values are exact, acceptance needs three
    consecutive relative steps below tolerance, and the result is
    Aitken-accelerated."""
    a, b0, q0 = _first_strict_interval(values)
    vals = []
    small_steps = 0
    for q in range(q0, EVEN_LIMIT_MAX_Q + 1):
        b = Fraction(2 ** q)
        v_low, v_up = compact_reciprocal_values(values, a, b)
        vals.append(float(min(v_low, v_up)))
        if len(vals) >= 2:
            scale = max(1.0, abs(vals[-1]))
            if abs(vals[-1] - vals[-2]) < EVEN_LIMIT_REL_TOL * scale:
                small_steps += 1
                if small_steps >= 3:
                    break
            else:
                small_steps = 0
    else:
        raise ConvergenceError("compact infima did not settle before the cap")
    if len(vals) >= 3:
        v0, v1, v2 = vals[-3], vals[-2], vals[-1]
        denom = v2 - 2 * v1 + v0
        if denom != 0:
            accel = v2 - (v2 - v1) ** 2 / denom
            if math.isfinite(accel):
                return accel
    return vals[-1]


def _singular_reciprocal(values) -> Scalar:
    """Reciprocal moment of the unique measure of a singularly positive
    window, via the support polynomial's backward moment recurrence -- exact
    even when the atoms are irrational.  The support size r is the Hankel
    rank and 2r never exceeds the window length for singular windows."""
    from .measure import MomentRecurrence
    from .numeric import hankel
    from .positivity import _leading_rank
    if all(v == 0 for v in values):
        return Fraction(0)
    n = len(values) - 1
    r = _leading_rank(hankel(values, 0, n // 2 + 1))
    if r == 0:
        return Fraction(0)
    poly = bordered_hankel_poly(list(values[:2 * r]))
    return MomentRecurrence(poly, 0, list(values)).moment(-1)


def reciprocal_inf_ray(s) -> Scalar:
    """Infimum of the reciprocal integral over representing measures on
    (0, inf): exact (rational) for odd top degree, a floating limit for even
    top degree.  A single-moment window has infimum 0 (mass drifts right);
    a singularly positive window is determinate, so the value is the unique
    measure's reciprocal moment."""
    values = _values(s)
    verdict = classify_ray(values)
    if verdict.kind is PositivityClass.NOT_POSITIVE:
        raise NotStrictlyPositive("sequence is not positive on (0, inf)")
    if verdict.kind is PositivityClass.SINGULARLY_POSITIVE:
        return _singular_reciprocal(values)
    n = len(values) - 1
    if n == 0:
        return Fraction(0)
    if n % 2 == 1:
        return reciprocal_value_from_poly(bordered_hankel_poly(values), values)
    return _even_ray_limit(values)


def reciprocal_inf_half_open(s) -> Scalar:
    """Infimum of the reciprocal integral on (0, 1]; exact in both parities
    (the minimizing measure's polynomial does not depend on the left
    endpoint).  A singularly positive sequence is determinate and the value
    is the reciprocal moment of its unique measure."""
    values = _values(s)
    verdict = classify_half_open(values)
    if verdict.kind is PositivityClass.NOT_POSITIVE:
        raise NotStrictlyPositive("sequence is not positive on (0, 1]")
    if verdict.kind is PositivityClass.SINGULARLY_POSITIVE:
        return _singular_reciprocal(values)
    n = len(values) - 1
    if n % 2 == 1:
        poly = bordered_hankel_poly(values)
    else:
        diffs = [values[k] - values[k + 1] for k in range(n)]
        inner = bordered_hankel_poly(diffs) if diffs else Polynomial([1])
        poly = inner.mul_linear(1, -1)
    return reciprocal_value_from_poly(poly, values)


def reciprocal_sup_ray_bounds(s) -> ExtremalBounds:
    """Bounds object for (0, inf): exact/limit infimum, unbounded supremum."""
    values = _values(s)
    t_lo = reciprocal_inf_ray(values)
    return ExtremalBounds(t_lo, math.inf, None, None)


def unbounded_reciprocal_witness(s, target: Scalar, max_halvings: int = 500):
    """Interval [a, b] on which the compact supremum exceeds `target`;
    exists for every strictly positive sequence because the supremum blows
    up as a -> 0."""
    values = _values(s)
    if classify_ray(values).kind is not PositivityClass.STRICTLY_POSITIVE:
        raise NotStrictlyPositive("sequence is not strictly positive on (0, inf)")
    a, b, _ = _first_strict_interval(values)
    for _ in range(max_halvings):
        v_low, v_up = compact_reciprocal_values(values, a, b)
        if max(v_low, v_up) > target:
            return a, b
        a = a / 2
    raise ConvergenceError("supremum failed to exceed the target before the cap")
