"""Scalar, dense symmetric matrix and polynomial kernel.

Arithmetic is exact by default: scalars are `fractions.Fraction` and every
determinant / elimination / root-isolation path stays rational.  If any input
is a `float` the same code runs in floating mode, with sign tests widened to
a relative tolerance (`eps`, default 1e-9).

Hankel forms here are catastrophically ill-conditioned, and the verdicts the
rest of the package needs (definite vs. singular vs. indefinite) sit exactly
on the knife edge, which is why rational arithmetic is the default and not an
option.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import DegenerateInput, InsufficientMoments, ShapeError

Scalar = Union[Fraction, int, float]

#: Default width of the rational enclosure returned for irrational roots.
DEFAULT_ROOT_PRECISION = Fraction(1, 10**12)

#: Default relative tolerance for floating-point sign tests.
DEFAULT_EPS = 1e-9


# --------------------------------------------------------------------------
# scalar helpers
# --------------------------------------------------------------------------

def is_exact(x: Scalar) -> bool:
    return not isinstance(x, float)


def all_exact(values) -> bool:
    return all(is_exact(v) for v in values)


def parse_scalar(text: str, exact: bool = True) -> Scalar:
    """Parse a decimal or ``p/q`` string.

    Exact mode maps decimal strings to their exact rational value.
    """
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        value = Fraction(num.strip()) / Fraction(den.strip())
        return value if exact else float(value)
    if exact:
        return Fraction(text)
    return float(text)


def format_scalar(x: Scalar) -> str:
    if isinstance(x, float):
        return repr(x)
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_fraction(x: Scalar) -> Fraction:
    """Exact conversion (binary-exact for floats)."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def sign(x: Scalar, tol: Scalar = 0) -> int:
    if x > tol:
        return 1
    if x < -tol:
        return -1
    return 0


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational with the smallest denominator in the closed interval [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        lo, hi = hi, lo
    if lo == hi:
        return lo
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_between(-hi, -lo)
    # now 0 < lo < hi
    fl = lo.numerator // lo.denominator
    if lo == fl:
        return lo
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    rest = simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / rest


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial, coefficients lowest degree first.

    Trailing zero coefficients are stripped at construction; the zero
    polynomial is represented by an empty coefficient tuple.
    """

    coeffs: tuple

    def __init__(self, coeffs: Sequence[Scalar]):
        coeffs = [c if isinstance(c, float) else Fraction(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: Scalar) -> Scalar:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def scale(self, factor: Scalar) -> "Polynomial":
        return Polynomial([c * factor for c in self.coeffs])

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Polynomial([c / lead for c in self.coeffs])

    def mul(self, other: "Polynomial") -> "Polynomial":
        if self.is_zero() or other.is_zero():
            return Polynomial([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def mul_linear(self, c0: Scalar, c1: Scalar) -> "Polynomial":
        """Multiply by (c0 + c1*t)."""
        return self.mul(Polynomial([c0, c1]))

    def deflate(self, root: Scalar) -> "Polynomial":
        """Exact synthetic division by (t - root); remainder must vanish."""
        out = []
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * root + c
            out.append(acc)
        rem = out.pop()
        if rem != 0:
            raise DegenerateInput("deflation by a non-root")
        out.reverse()
        return Polynomial(out)

    def shifted_quotient_at_zero(self) -> "Polynomial":
        """(p(t) - p(0)) / t."""
        return Polynomial(self.coeffs[1:])


def _poly_rem(f: Polynomial, g: Polynomial) -> Polynomial:
    """Remainder of f by g over the rationals."""
    fc = list(f.coeffs)
    gc = g.coeffs
    dg = len(gc) - 1
    lead = gc[-1]
    while len(fc) - 1 >= dg and fc:
        q = fc[-1] / lead
        shift = len(fc) - 1 - dg
        for i, c in enumerate(gc):
            fc[shift + i] -= q * c
        while fc and fc[-1] == 0:
            fc.pop()
    return Polynomial(fc)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    while not g.is_zero():
        r = _poly_rem(f, g)
        f, g = g, (r.monic() if not r.is_zero() else r)
    return f.monic() if not f.is_zero() else f


def _sturm_chain(p: Polynomial) -> list:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero() and chain[-1].degree > 0:
        rem = _poly_rem(chain[-2], chain[-1])
        if rem.is_zero():
            break
        chain.append(rem.scale(-1))
    if chain[-1].is_zero():
        chain.pop()
    return chain


def _sign_variations(chain, x) -> int:
    signs = []
    for q in chain:
        s = sign(q(x))
        if s != 0:
            signs.append(s)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def root_precision() -> Fraction:
    """Target enclosure width for irrational roots (env-overridable)."""
    env = os.environ.get("MOMENTKIT_PRECISION")
    if env:
        return abs(as_fraction(parse_scalar(env)))
    return DEFAULT_ROOT_PRECISION


def _try_exact_root(p: Polynomial, lo: Fraction, hi: Fraction):
    cand = simplest_between(lo, hi)
    if p(cand) == 0:
        return cand
    return None


def _refine_root(p: Polynomial, lo: Fraction, hi: Fraction, width: Fraction) -> Fraction:
    """Bisect a sign-changing enclosure; return an exact root when the root is
    rational, otherwise the midpoint of an enclosure of width <= `width`."""
    slo = sign(p(lo))
    if slo == 0:
        return lo
    if sign(p(hi)) == 0:
        return hi
    rounds = 0
    while hi - lo > width:
        if rounds % 3 == 0:
            exact = _try_exact_root(p, lo, hi)
            if exact is not None:
                return exact
        mid = (lo + hi) / 2
        sm = sign(p(mid))
        if sm == 0:
            return mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
        rounds += 1
    exact = _try_exact_root(p, lo, hi)
    if exact is not None:
        return exact
    return (lo + hi) / 2


def _real_roots_float(p: Polynomial, lo: float, hi: float, eps: float) -> list:
    import numpy as np

    coeffs = [float(c) for c in reversed(p.coeffs)]
    roots = np.roots(coeffs)
    scale = max(abs(lo), abs(hi), 1.0)
    out = []
    for z in roots:
        if abs(z.imag) > math.sqrt(eps) * scale:
            continue
        x = float(z.real)
        if lo - eps * scale <= x <= hi + eps * scale:
            out.append(float(min(max(x, lo), hi)))
    out.sort()
    dedup = []
    for x in out:
        if dedup and abs(x - dedup[-1]) <= math.sqrt(eps) * scale:
            raise DegenerateInput("repeated root in floating root isolation")
        dedup.append(x)
    return dedup


def real_roots(p: Polynomial, lo: Scalar, hi: Scalar,
               precision: Optional[Fraction] = None,
               eps: float = DEFAULT_EPS) -> list:
    """All real roots of `p` in [lo, hi], ascending.

    Exact mode (rational coefficients) isolates by Sturm bisection, snaps
    rational roots exactly, and narrows irrational ones to enclosures of the
    requested width.  Repeated roots raise DegenerateInput: every polynomial
    this package feeds in here is guaranteed simple by the theory, so a
    multiple root signals corrupted input.
    """
    if p.is_zero():
        raise DegenerateInput("zero polynomial has no isolated roots")
    if not (all_exact(p.coeffs) and is_exact(lo) and is_exact(hi)):
        return _real_roots_float(p, float(lo), float(hi), eps)
    lo, hi = as_fraction(lo), as_fraction(hi)
    if lo > hi:
        raise ShapeError("empty interval")
    if p.degree == 0:
        return []
    g = poly_gcd(p, p.derivative())
    if g.degree > 0:
        raise DegenerateInput("polynomial has a repeated root")
    width = precision if precision is not None else root_precision()

    roots = []
    work = p
    # endpoint roots, then strictly interior isolation
    if work(lo) == 0:
        roots.append(lo)
        work = work.deflate(lo)
    if not work.is_zero() and work.degree >= 0 and work(hi) == 0 and hi != lo:
        roots.append(hi)
        work = work.deflate(hi)
    if work.degree >= 1:
        chain = _sturm_chain(work)
        # intervals are half-open (a, b] with p nonzero at both endpoints
        # (endpoint roots were deflated above), so Sturm counts stay exact
        stack = [(lo, hi, _sign_variations(chain, lo) - _sign_variations(chain, hi))]
        while stack:
            a, b, count = stack.pop()
            if count <= 0:
                continue
            if count == 1:
                roots.append(_refine_root(work, a, b, width))
                continue
            mid = _nonroot_split(work, a, b)
            va, vm, vb = (_sign_variations(chain, a), _sign_variations(chain, mid),
                          _sign_variations(chain, b))
            stack.append((a, mid, va - vm))
            stack.append((mid, b, vm - vb))
    return sorted(roots)


def _nonroot_split(p: Polynomial, a: Fraction, b: Fraction) -> Fraction:
    """A split point strictly inside (a, b) where p does not vanish; at most
    deg(p) probes can fail."""
    span = b - a
    steps = p.degree + 2
    for i in range(steps):
        mid = a + span * Fraction(2 * i + steps, 4 * steps)
        if p(mid) != 0:
            return mid
    raise DegenerateInput("could not find a non-root split point")


# --------------------------------------------------------------------------
# symmetric matrices and quadratic-form classification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix; symmetry is exact by construction."""

    rows: tuple

    def __init__(self, rows):
        rows = tuple(tuple(x if isinstance(x, float) else Fraction(x) for x in r)
                     for r in rows)
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise ShapeError("matrix is not square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ShapeError("matrix is not symmetric")
        object.__setattr__(self, "rows", rows)

    @property
    def order(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Scalar:
        return self.rows[i][j]

    def quadratic_form(self, v) -> Scalar:
        n = self.order
        return sum(self.rows[i][j] * v[i] * v[j] for i in range(n) for j in range(n))


class FormClass(Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE_SINGULAR = "PositiveSemidefiniteSingular"
    INDEFINITE = "Indefinite"


@dataclass(frozen=True)
class FormVerdict:
    """Classification of a symmetric form plus a checkable witness.

    pivots: the positive diagonal pivots found (a PD certificate when full),
    kernel: an exact kernel vector in the singular case,
    negative_witness: a vector with strictly negative form value when
    indefinite.
    """

    kind: FormClass
    pivots: tuple = ()
    kernel: Optional[tuple] = None
    negative_witness: Optional[tuple] = None

    @property
    def is_psd(self) -> bool:
        return self.kind is not FormClass.INDEFINITE


def hankel(values, offset: int, order: int) -> SymMatrix:
    """Hankel window: entry (i, j) = values[offset + i + j].  Accepts any
    moment-window object exposing .values as well as a plain sequence."""
    values = getattr(values, "values", values)
    if order < 0 or offset < 0:
        raise InsufficientMoments("offset and order must be nonnegative")
    if order > 0 and offset + 2 * (order - 1) > len(values) - 1:
        raise InsufficientMoments(
            f"window of length {len(values)} cannot fill a Hankel block of "
            f"order {order} at offset {offset}")
    return SymMatrix([[values[offset + i + j] for j in range(order)]
                      for i in range(order)])


def classify_form(m: SymMatrix, eps: Optional[float] = None) -> FormVerdict:
    """Classify a symmetric form by diagonally pivoted congruence elimination.

    Exact inputs give an exact verdict.  Floating inputs use |x| <= eps*scale
    as the zero test.  The returned witness is exact in rational mode: the
    kernel vector satisfies M v = 0, the negative witness v has v'Mv < 0.
    """
    n = m.order
    if n == 0:
        return FormVerdict(FormClass.POSITIVE_DEFINITE)
    a = [list(r) for r in m.rows]
    exact = all(all_exact(r) for r in a)
    if exact:
        a = [[as_fraction(x) for x in r] for r in a]
    if eps is None:
        eps = 0.0 if exact else DEFAULT_EPS
    if exact:
        thresh = 0
    else:
        scale = max(max(abs(x) for x in r) for r in a)
        thresh = eps * max(scale, 1.0)
    one = Fraction(1) if exact else 1.0
    lower = [[one if i == j else 0 * one for j in range(n)] for i in range(n)]
    perm = list(range(n))
    pivots = []

    def map_back(y):
        # solve L^T z = y (unit diagonal), then undo the permutation
        z = list(y)
        for i in range(n - 1, -1, -1):
            for j in range(i + 1, n):
                z[i] -= lower[j][i] * z[j]
        out = [0 * one] * n
        for pos, orig in enumerate(perm):
            out[orig] = z[pos]
        return tuple(out)

    def swap(k, j):
        if k == j:
            return
        a[k], a[j] = a[j], a[k]
        for row in a:
            row[k], row[j] = row[j], row[k]
        perm[k], perm[j] = perm[j], perm[k]
        # only the already-computed multiplier columns move with the rows
        for col in range(k):
            lower[k][col], lower[j][col] = lower[j][col], lower[k][col]

    for k in range(n):
        # best available diagonal pivot
        j = max(range(k, n), key=lambda i: abs(a[i][i]))
        if abs(a[j][j]) <= thresh:
            off = None
            for i in range(k, n):
                for l in range(i + 1, n):
                    if abs(a[i][l]) > thresh and (off is None or abs(a[i][l]) > abs(a[off[0]][off[1]])):
                        off = (i, l)
            if off is None:
                kernel = map_back([one if i == k else 0 * one for i in range(n)])
                return FormVerdict(FormClass.POSITIVE_SEMIDEFINITE_SINGULAR,
                                   tuple(pivots), kernel=kernel)
            i, l = off
            y = [0 * one] * n
            y[i] = one
            y[l] = -one if a[i][l] > 0 else one
            witness = map_back(y)
            return FormVerdict(FormClass.INDEFINITE, tuple(pivots),
                               negative_witness=witness)
        if a[j][j] < 0:
            swap(k, j)
            witness = map_back([one if i == k else 0 * one for i in range(n)])
            return FormVerdict(FormClass.INDEFINITE, tuple(pivots),
                               negative_witness=witness)
        swap(k, j)
        piv = a[k][k]
        pivots.append(piv)
        for i in range(k + 1, n):
            f = a[i][k] / piv
            lower[i][k] = f
            for l in range(k + 1, n):
                a[i][l] -= f * a[k][l]
        # clear the pivot row/column only after every row used it
        for i in range(k + 1, n):
            a[i][k] = 0 * one
            a[k][i] = 0 * one
    return FormVerdict(FormClass.POSITIVE_DEFINITE, tuple(pivots))


def kernel_vector(m: SymMatrix):
    """Exact kernel vector of a singular symmetric matrix (rational mode)."""
    verdict = classify_form(m)
    if verdict.kind is not FormClass.POSITIVE_SEMIDEFINITE_SINGULAR:
        raise DegenerateInput("matrix is not singular positive semidefinite")
    return verdict.kernel


# --------------------------------------------------------------------------
# determinants and linear solves
# --------------------------------------------------------------------------

def det(rows) -> Scalar:
    """Determinant; fraction-free (Bareiss) in exact mode."""
    a = [list(r) for r in rows]
    n = len(a)
    for r in a:
        if len(r) != n:
            raise ShapeError("determinant of a non-square layout")
    if n == 0:
        return Fraction(1)
    if not all(all_exact(r) for r in a):
        return _det_float(a)
    # clear denominators column by column to keep Bareiss in integers
    scale = Fraction(1)
    for j in range(n):
        denom = 1
        for i in range(n):
            denom = denom * as_fraction(a[i][j]).denominator // math.gcd(
                denom, as_fraction(a[i][j]).denominator)
        if denom != 1:
            scale /= denom
            for i in range(n):
                a[i][j] = a[i][j] * denom
    a = [[int(x) for x in row] for row in a]
    sign_acc = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot_row = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot_row is None:
                return Fraction(0)
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign_acc = -sign_acc
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return scale * sign_acc * a[n - 1][n - 1]


def _det_float(a) -> float:
    n = len(a)
    a = [[float(x) for x in row] for row in a]
    result = 1.0
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0.0:
            return 0.0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            result = -result
        result *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    return result


def solve_linear(rows, rhs):
    """Solve a square linear system by Gaussian elimination with pivoting."""
    n = len(rows)
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    exact = all(all_exact(r) for r in a)
    if exact:
        a = [[as_fraction(x) for x in r] for r in a]
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            raise DegenerateInput("singular linear system")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n + 1):
                a[i][j] -= f * a[k][j]
    x = [0] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n] - sum(a[i][j] * x[j] for j in range(i + 1, n))
        x[i] = acc / a[i][i]
    if exact:
        x = [as_fraction(v) for v in x]
    return x


def det_poly(rows, degrees: Optional[Sequence[int]] = None) -> Polynomial:
    """Determinant of a layout whose last column is monomials t^degrees[j].

    Built by cofactor expansion along the monomial column; the coefficient of
    t^degrees[j] is the signed minor obtained by deleting row j.
    """
    m = len(rows) - 1
    if m < 0:
        raise ShapeError("empty layout")
    for r in rows:
        if len(r) != m:
            raise ShapeError("rows plus monomial column must form a square layout")
    if degrees is None:
        degrees = list(range(m + 1))
    if len(degrees) != m + 1:
        raise ShapeError("one monomial degree per row is required")
    coeffs = [0] * (max(degrees) + 1) if degrees else []
    for j in range(m + 1):
        minor_rows = [rows[i] for i in range(m + 1) if i != j]
        minor = det(minor_rows) if m > 0 else Fraction(1)
        coeffs[degrees[j]] += (-1) ** (j + m) * minor
    return Polynomial(coeffs)


def vandermonde_masses(atoms: Sequence[Scalar], window: Sequence[Scalar]):
    """Masses matching the first len(atoms) moments of `window` at `atoms`."""
    c = len(atoms)
    if c == 0:
        return []
    if len(window) < c:
        raise InsufficientMoments("moment window shorter than atom count")
    rows = [[atoms[j] ** k for j in range(c)] for k in range(c)]
    return solve_linear(rows, list(window[:c]))
