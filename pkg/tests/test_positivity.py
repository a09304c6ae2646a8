from fractions import Fraction as F

import pytest

from momentkit.errors import DomainError, NotAMomentSequence
from momentkit.measure import moments
from momentkit.positivity import (Compact, HalfOpen, PositivityClass, Ray,
                                  classify, classify_compact, classify_half_open,
                                  classify_ray, index, recover_minimal_measure)
from conftest import random_half_open_measure, random_rational_measure

S = PositivityClass.STRICTLY_POSITIVE
G = PositivityClass.SINGULARLY_POSITIVE
N = PositivityClass.NOT_POSITIVE


def test_classify_compact_examples():
    assert classify_compact([2, 3, 5], 1, 2).kind is G
    assert classify_compact([2, 3, 5], F(1, 2), 4).kind is S
    assert classify_compact([1, 2, 5], 1, 2).kind is N


def test_classify_compact_domain_error():
    with pytest.raises(DomainError):
        classify_compact([1, 1], 2, 1)


def test_classify_ray_examples():
    assert classify_ray([2, 3, 5, 9]).kind is S
    assert classify_ray([1, 1, 1]).kind is G
    assert classify_ray([1, 2, 3]).kind is N


def test_classify_ray_negative_entry():
    with pytest.raises(DomainError):
        classify_ray([1, -1])


def test_classify_half_open_examples():
    assert classify_half_open([3, 2, F(3, 2)]).kind is S
    assert classify_half_open([1, 1, 1]).kind is G
    assert classify_half_open([1, 2, 4]).kind is N


def test_index_examples():
    assert index([2, 3, 5, 9], Ray()) == 2
    assert index([1, 1, 1, 1], Ray()) == 1
    assert index([1, 1], HalfOpen()) == F(1, 2)
    assert index([2, 3, 5], Compact(1, 2)) == 1
    assert index([2, 3, 5], Compact(F(1, 2), 4)) == F(3, 2)


def test_index_rejects_non_positive():
    with pytest.raises(NotAMomentSequence):
        index([1, 2, 3], Ray())


def test_zero_sequence():
    assert classify_ray([0, 0, 0]).kind is G
    assert index([0, 0], Ray()) == 0
    assert recover_minimal_measure([0, 0], Ray()).support_size == 0


def test_round_trip_strict_and_index(rng):
    # K-atom measure, window of length 2K: strictly positive with index K
    for _ in range(150):
        k = rng.randint(1, 4)
        mu = random_rational_measure(rng, k)
        window = moments(mu, 0, 2 * k - 1)
        assert classify_ray(window).kind is S
        assert index(window, Ray()) == k


def test_enlargement_monotonicity(rng):
    for _ in range(200):
        mu = random_rational_measure(rng, rng.randint(1, 3))
        window = moments(mu, 0, rng.randint(1, 4))
        lo, hi = mu.atoms[0][0], mu.atoms[-1][0]
        a, b = lo / 2, 2 * hi + 1
        if classify_compact(window, a, b).kind is S:
            assert classify_compact(window, a / 2, b + 3).kind is S


def test_singular_recovery_examples():
    mu = recover_minimal_measure([2, 3, 5], Compact(1, 2))
    assert mu.atoms == ((1, 1), (2, 1))
    mu = recover_minimal_measure([1, 1, 1], Ray())
    assert mu.atoms == ((1, 1),)
    mu = recover_minimal_measure([1, 1], HalfOpen())
    assert mu.atoms == ((1, 1),)


def test_singular_recovery_random(rng):
    # a K-atom measure seen through a window of length 2K+1 is singular and
    # uniquely recoverable
    for _ in range(80):
        k = rng.randint(1, 3)
        mu = random_rational_measure(rng, k)
        window = moments(mu, 0, 2 * k)
        assert classify_ray(window).kind is G
        assert recover_minimal_measure(window, Ray()) == mu
        assert index(window, Ray()) == k


def test_index_upper_bounds(rng):
    for _ in range(100):
        mu = random_rational_measure(rng, rng.randint(1, 3))
        n = rng.randint(0, 4)
        window = moments(mu, 0, n)
        assert index(window, Ray()) <= -((n + 1) // -2)
        on_unit = random_half_open_measure(rng, rng.randint(1, 2))
        window = moments(on_unit, 0, n)
        assert index(window, HalfOpen()) <= F(n + 1, 2)


def test_half_open_strict_needs_interior(rng):
    # measures with an endpoint atom at 1 and k interior atoms: strictly
    # positive iff the window is short enough
    for _ in range(40):
        k = rng.randint(1, 2)
        mu = random_half_open_measure(rng, k + 1, include_one=True)
        window = moments(mu, 0, 2 * k)   # index k + 1/2 = (n+1)/2: strict
        assert classify_half_open(window).kind is S
        longer = moments(mu, 0, 2 * k + 2)
        assert classify_half_open(longer).kind is G


def test_classify_dispatch():
    assert classify([1, 1], Ray()).kind is S
    assert classify([1, 1], HalfOpen()).kind is G
    assert classify([1, 1], Compact(F(1, 2), 2)).kind is S
