"""Directed trees with one branching point: weights, boundedness, vertex
moment sequences, and certificate verification.

The tree has a trunk of kappa vertices 0, -1, ..., -(kappa-1) feeding a
single branching vertex 0 with eta outgoing branches (i, 1), (i, 2), ...
Branches are grouped into classes sharing the same squared weights from the
second generation on; a class carries the total squared first weight of its
members, which is the only way first weights ever enter any criterion.
Infinite eta is supported exactly for this finitely-described (cofinitely
flat) shape.

All weights are handled squared: the criteria are polynomial in the squares
and stay rational for inputs like sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import CertificateInvalid, DegenerateInput, Unsupported, ZeroAtomError
from .measure import MomentSequence
from .numeric import Scalar


def _pos_sq(x, what: str):
    if isinstance(x, float):
        if not x > 0:
            raise DegenerateInput(f"{what} must be positive")
        return x
    x = Fraction(x)
    if not x > 0:
        raise DegenerateInput(f"{what} must be positive")
    return x


@dataclass(frozen=True)
class TreeShape:
    """eta branches (math.inf allowed), trunk length kappa >= 0
    (math.inf means the one-sided infinite trunk)."""

    eta: Union[int, float]
    kappa: Union[int, float]

    def __post_init__(self):
        if self.eta != math.inf and (int(self.eta) != self.eta or self.eta < 1):
            raise DegenerateInput("eta must be a positive integer or inf")
        if self.kappa != math.inf and (int(self.kappa) != self.kappa or self.kappa < 0):
            raise DegenerateInput("kappa must be a nonnegative integer or inf")


@dataclass(frozen=True)
class BranchClass:
    """A group of branches sharing their squared weights from generation 2
    on.  first_mass is the total squared first weight over the group
    (math.inf for an infinite group with a fixed positive first weight);
    count is None for infinite groups."""

    first_mass: Scalar
    tail_sq: tuple
    count: Optional[int] = 1

    def __init__(self, first_mass, tail_sq=(), count=1):
        if first_mass != math.inf:
            first_mass = _pos_sq(first_mass, "first-weight mass")
        tail_sq = tuple(_pos_sq(t, "branch weight square") for t in tail_sq)
        object.__setattr__(self, "first_mass", first_mass)
        object.__setattr__(self, "tail_sq", tail_sq)
        object.__setattr__(self, "count", count)


@dataclass(frozen=True)
class PartialWeights:
    """Prescribed data of the completion problem: trunk squared weights
    (lambda_0^2, lambda_{-1}^2, ..., lambda_{-(kappa-1)}^2) and branch
    classes with p prescribed generations (tail_sq has length p-1)."""

    trunk_sq: tuple
    classes: tuple
    p: int

    def __init__(self, trunk_sq, classes, p=None):
        trunk_sq = tuple(_pos_sq(t, "trunk weight square") for t in trunk_sq)
        classes = tuple(classes)
        if not classes:
            raise DegenerateInput("at least one branch class is required")
        lengths = {len(c.tail_sq) for c in classes}
        if len(lengths) != 1:
            raise DegenerateInput("branch classes must share the generation depth")
        depth = lengths.pop() + 1
        if p is None:
            p = depth
        if p != depth:
            raise DegenerateInput(f"p={p} inconsistent with tails of length {depth - 1}")
        object.__setattr__(self, "trunk_sq", trunk_sq)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "p", int(p))

    @property
    def kappa(self) -> int:
        return len(self.trunk_sq)

    @property
    def eta(self):
        if any(c.count is None for c in self.classes):
            return math.inf
        return sum(c.count for c in self.classes)

    @property
    def first_mass_total(self):
        return sum(c.first_mass for c in self.classes)

    @staticmethod
    def from_branch_lists(trunk_sq, branches_sq, counts=None) -> "PartialWeights":
        """branches_sq: one list (lambda_{i,1}^2, ..., lambda_{i,p}^2) per
        branch (class)."""
        classes = []
        for i, br in enumerate(branches_sq):
            count = 1 if counts is None else counts[i]
            classes.append(BranchClass(br[0] if count in (1, None) or count == 1
                                       else br[0] * count,
                                       tuple(br[1:]), count))
        return PartialWeights(trunk_sq, classes)


# --------------------------------------------------------------------------
# completed weights
# --------------------------------------------------------------------------

class ListTail:
    """Branch weight-square generator backed by an explicit list for
    generations 2..(len+1); beyond it, either repeats the last value or is
    undefined.  declared_sup lets callers describe unbounded analytic data."""

    def __init__(self, weights_sq, repeat_last=True, declared_sup=None):
        self.weights_sq = tuple(_pos_sq(w, "weight square") for w in weights_sq)
        self.repeat_last = repeat_last
        self.declared_sup = declared_sup

    def weight_sq(self, j: int):
        idx = j - 2
        if idx < len(self.weights_sq):
            return self.weights_sq[idx]
        if self.repeat_last and self.weights_sq:
            return self.weights_sq[-1]
        raise Unsupported(f"generation {j} beyond the described tail")

    def sup_weight_sq(self):
        if self.declared_sup is not None:
            return self.declared_sup
        if not self.weights_sq:
            raise Unsupported("empty weight description")
        return max(self.weights_sq)


class MeasureTail:
    """Branch weight squares from a branch measure: prescribed squares for
    generations 2..p, then the measure's consecutive moment ratios."""

    def __init__(self, prefix_sq, measure):
        self.prefix_sq = tuple(_pos_sq(w, "weight square") for w in prefix_sq)
        self.measure = measure

    def weight_sq(self, j: int):
        idx = j - 2
        if idx < len(self.prefix_sq):
            return self.prefix_sq[idx]
        return self.measure.moment(j - 1) / self.measure.moment(j - 2)

    def sup_weight_sq(self):
        sup = self.measure.max_atom()
        if self.prefix_sq:
            sup = max(sup, max(self.prefix_sq))
        return sup


class GeometricSumTail:
    """Branch weight squares of a completely hyperexpansive branch: ratios
    of 1 + integral(1 + ... + t^(n-1)) dtau."""

    def __init__(self, prefix_sq, tau):
        self.prefix_sq = tuple(_pos_sq(w, "weight square") for w in prefix_sq)
        self.tau = tau

    def _gamma(self, n: int):
        return 1 + self.tau.geometric_sum(n)

    def weight_sq(self, j: int):
        idx = j - 2
        if idx < len(self.prefix_sq):
            return self.prefix_sq[idx]
        return self._gamma(j - 1) / self._gamma(j - 2)

    def sup_weight_sq(self):
        # gamma ratios decrease toward 1 for measures on (0, 1]
        sup = self.weight_sq(len(self.prefix_sq) + 2)
        if self.prefix_sq:
            sup = max(sup, max(self.prefix_sq))
        return sup


@dataclass(frozen=True)
class FullBranch:
    first_mass: Scalar
    generator: object
    count: Optional[int] = 1


@dataclass(frozen=True)
class FullWeights:
    """A completed weight assignment: finite trunk prefix plus per-class
    branch generators.  kappa_infinite marks shifts whose trunk extends
    isometrically to the left."""

    trunk_sq: tuple
    classes: tuple
    kappa_infinite: bool = False

    def __init__(self, trunk_sq, classes, kappa_infinite=False):
        object.__setattr__(self, "trunk_sq",
                           tuple(_pos_sq(t, "trunk weight square") for t in trunk_sq))
        object.__setattr__(self, "classes", tuple(classes))
        object.__setattr__(self, "kappa_infinite", bool(kappa_infinite))

    @property
    def kappa(self):
        return math.inf if self.kappa_infinite else len(self.trunk_sq)

    @property
    def first_mass_total(self):
        return sum(c.first_mass for c in self.classes)

    def branch_weight_sq(self, i: int, j: int):
        return self.classes[i - 1].generator.weight_sq(j)


def vertex_moments(w: FullWeights, u, n: int) -> MomentSequence:
    """Moment sequence (||S^m e_u||^2)_{m=0..n}: forward path products of
    squared weights, summed over branches past the branching vertex."""
    out = [Fraction(1)]
    if isinstance(u, tuple):
        i, j = u
        acc = Fraction(1)
        for m in range(1, n + 1):
            acc = acc * w.branch_weight_sq(i, j + m)
            out.append(acc)
        return MomentSequence(0, out)
    k = -u
    if k < 0 or (not w.kappa_infinite and k > len(w.trunk_sq)):
        raise DegenerateInput(f"vertex {u} outside the tree")
    trunk_acc = Fraction(1)
    for m in range(1, n + 1):
        if m <= k:
            # lambda_{-(k-m)}^2
            trunk_acc = trunk_acc * w.trunk_sq[k - m]
            out.append(trunk_acc)
        else:
            steps = m - k  # generations past the branching vertex
            total = Fraction(0)
            for c in w.classes:
                prod = Fraction(1)
                for j in range(2, steps + 1):
                    prod = prod * c.generator.weight_sq(j)
                total += c.first_mass * prod
            out.append(trunk_acc * total)
    return MomentSequence(0, out)


@dataclass(frozen=True)
class BoundednessVerdict:
    bounded: bool
    norm_sq_bound: Scalar  # sup over vertices of the outgoing square sums


def is_bounded(w: FullWeights, depth: int = 64) -> BoundednessVerdict:
    """Evaluate the boundedness supremum (the squared operator norm): the
    branching vertex contributes the total first-weight mass, every other
    vertex a single squared weight."""
    candidates = [w.first_mass_total]
    candidates.extend(w.trunk_sq)
    for c in w.classes:
        candidates.append(c.generator.sup_weight_sq())
    if w.kappa_infinite:
        candidates.append(Fraction(1))  # isometric trunk continuation
    bound = max(candidates)
    return BoundednessVerdict(bound != math.inf, bound)


# --------------------------------------------------------------------------
# certificate verification
# --------------------------------------------------------------------------

def _tolerance(*vals):
    if any(isinstance(v, float) for v in vals):
        return 1e-9 * max(1.0, max(abs(float(v)) for v in vals))
    return 0


def _eq(a, b) -> bool:
    """Exact equality for exact operands, tolerance band otherwise."""
    return abs(a - b) <= _tolerance(a, b)


def _le(a, b) -> bool:
    return a <= b + _tolerance(a, b)


def _check(condition: bool, identity: str):
    if not condition:
        raise CertificateInvalid(f"violated: {identity}", identity=identity)


def verify_subnormal_certificate(w: FullWeights, measures, depth: int = 12) -> bool:
    """Check the branch moment identities and the trunk reciprocal-moment
    chain of a subnormal certificate, exactly, to the given depth."""
    if len(measures) != len(w.classes):
        raise CertificateInvalid("one measure per branch class is required")
    for idx, (cls, mu) in enumerate(zip(w.classes, measures), start=1):
        prod = Fraction(1)
        _check(_eq(mu.moment(0), 1), f"branch {idx}: zeroth moment is 1")
        for n in range(1, depth + 1):
            prod = prod * cls.generator.weight_sq(n + 1)
            _check(_eq(mu.moment(n), prod),
                   f"branch {idx}: moment {n} equals the weight product")
    kappa = len(w.trunk_sq)
    trunk_prod = Fraction(1)
    # all-equality chain when the trunk is infinite (checked on its finite
    # prefix); otherwise equalities then a final bound
    top = min(depth, kappa) if w.kappa_infinite else kappa
    for k in range(top + 1):
        lhs = sum(cls.first_mass * mu.moment(-(k + 1))
                  for cls, mu in zip(w.classes, measures))
        rhs = 1 / trunk_prod
        if w.kappa_infinite or k < kappa:
            _check(_eq(lhs, rhs), f"trunk level {k}: reciprocal sum equality")
        else:
            _check(_le(lhs, rhs), f"trunk level {k}: reciprocal sum bound")
        if k < kappa:
            trunk_prod = trunk_prod * w.trunk_sq[k]
    return True


def verify_che_certificate(w: FullWeights, taus, depth: int = 12) -> bool:
    """Check the geometric-sum identities and the trunk chain of a
    completely hyperexpansive certificate; the infinite-trunk case checks
    the isometry conditions directly."""
    if len(taus) != len(w.classes):
        raise CertificateInvalid("one measure per branch class is required")
    for tau in taus:
        if tau.zero_mass != 0:
            raise ZeroAtomError("branch measures must not charge zero")
    if w.kappa_infinite:
        _check(all(_eq(t, 1) for t in w.trunk_sq), "isometry: trunk weights are 1")
        _check(_eq(w.first_mass_total, 1), "isometry: branching square sum is 1")
        for idx, (cls, tau) in enumerate(zip(w.classes, taus), start=1):
            _check(_eq(tau.total_mass(), 0), f"branch {idx}: isometry measure is zero")
            for j in range(2, depth + 2):
                _check(_eq(cls.generator.weight_sq(j), 1),
                       f"branch {idx}: isometry weights are 1")
        return True
    for idx, (cls, tau) in enumerate(zip(w.classes, taus), start=1):
        prod = Fraction(1)
        for n in range(1, depth + 1):
            prod = prod * cls.generator.weight_sq(n + 1)
            _check(_eq(1 + tau.geometric_sum(n), prod),
                   f"branch {idx}: geometric sum {n} equals the weight product")
    kappa = len(w.trunk_sq)
    total = w.first_mass_total
    if kappa == 0:
        lhs = 1 + sum(cls.first_mass * tau.moment(-1)
                      for cls, tau in zip(w.classes, taus))
        _check(_le(lhs, total), "root level: expansion bound")
        return True
    lhs = 1 + sum(cls.first_mass * tau.moment(-1)
                  for cls, tau in zip(w.classes, taus))
    _check(_eq(lhs, total), "trunk level 0: expansion equality")
    trunk_prod = Fraction(1)
    for k in range(1, kappa + 1):
        trunk_prod = trunk_prod * w.trunk_sq[k - 1]
        lhs = 1 + trunk_prod * sum(cls.first_mass * tau.moment(-(k + 1))
                                   for cls, tau in zip(w.classes, taus))
        rhs = w.trunk_sq[k - 1]
        if k < kappa:
            _check(_eq(lhs, rhs), f"trunk level {k}: expansion equality")
        else:
            _check(_le(lhs, rhs), f"trunk level {k}: expansion bound")
    return True
