from fractions import Fraction as F

import pytest

from momentkit.backward import (ExtensionClass, classify_backward, extend_with_index,
                                minimal_measure_with_reciprocal, reciprocal_moment)
from momentkit.errors import (ArityError, BadIndex, DomainError, InfeasibleChoice,
                              NotStrictlyPositive, OutOfRange)
from momentkit.extremal import reciprocal_inf_half_open, reciprocal_inf_ray
from momentkit.measure import moments
from momentkit.positivity import HalfOpen, PositivityClass, Ray, classify_ray, index
from conftest import random_rational_measure


def test_classify_backward_examples():
    assert classify_backward([2, 3, 5, 9], 2).kind is ExtensionClass.STRICT
    verdict = classify_backward([2, 3, 5, 9], F(3, 2))
    assert verdict.kind is ExtensionClass.SINGULAR
    assert verdict.measure.atoms == ((1, 1), (2, 1))
    assert verdict.measure.moment(-1) == F(3, 2)
    assert classify_backward([2, 3, 5], F(4, 3)).kind is ExtensionClass.NOT_EXTENSION


def test_classify_backward_guards():
    with pytest.raises(NotStrictlyPositive):
        classify_backward([1, 1, 1], 1)
    with pytest.raises(DomainError):
        classify_backward([2, 3, 5, 9], -1)


def test_trichotomy_sweep(rng):
    # for fixed s the verdicts split [0, inf) at the exact threshold
    for _ in range(25):
        k = rng.randint(1, 3)
        mu = random_rational_measure(rng, k)
        window = moments(mu, 0, 2 * k - 1)
        t = reciprocal_inf_ray(window)
        below = classify_backward(window, t * F(9, 10))
        at = classify_backward(window, t)
        above = classify_backward(window, t + F(1, 7))
        if t > 0:
            assert below.kind is ExtensionClass.NOT_EXTENSION
        assert at.kind is ExtensionClass.SINGULAR  # odd top degree
        assert above.kind is ExtensionClass.STRICT


def test_singular_only_for_odd_on_ray(rng):
    for _ in range(15):
        k = rng.randint(2, 3)
        mu = random_rational_measure(rng, k)
        window = moments(mu, 0, 2 * k - 2)  # even top degree
        t = reciprocal_inf_ray(window)
        near = F(t).limit_denominator(10 ** 12)
        verdict = classify_backward(window, near)
        assert verdict.kind is not ExtensionClass.SINGULAR


def test_half_open_singular_both_parities(rng):
    from conftest import random_half_open_measure
    for parity in (0, 1):
        for _ in range(10):
            mu = random_half_open_measure(rng, 2, include_one=(parity == 0))
            n = 2 if parity == 0 else 3
            window = moments(mu, 0, n)
            t = reciprocal_inf_half_open(window)
            verdict = classify_backward(window, t, HalfOpen())
            assert verdict.kind is ExtensionClass.SINGULAR
            assert verdict.measure.moment(-1) == t


def test_extend_with_index_example():
    seq, mu = extend_with_index([2, 3], 2, 2, free=[F(3, 2), F(5, 4)])
    assert seq.first_index == -2
    assert seq.values == (F(5, 4), F(3, 2), 2, 3)
    assert mu.atoms == ((1, 1), (2, 1))
    assert mu.moment(-2) == F(5, 4)
    seq, mu = extend_with_index([1, 1], 1, 1, free=[])
    assert seq.values == (1, 1, 1)
    assert mu.atoms == ((1, 1),)


def test_extend_with_index_errors():
    with pytest.raises(BadIndex):
        extend_with_index([2, 3], 1, 5, free=[1])
    with pytest.raises(ArityError):
        extend_with_index([2, 3], 2, 2, free=[F(3, 2)])
    with pytest.raises(InfeasibleChoice):
        extend_with_index([2, 3], 2, 2, free=[F(13, 10), F(5, 4)])  # 13/10 < 4/3


def test_extend_reaches_requested_index(rng):
    for _ in range(25):
        k = rng.randint(1, 2)
        mu = random_rational_measure(rng, k)
        n = 2 * k - 1
        window = moments(mu, 0, n)
        r = rng.randint(1, 3)
        k_lo, k_hi = k, -((n + r + 1) // -2)
        target_k = rng.randint(k_lo, k_hi)
        free_count = max(min(2 * target_k - 1 - n, r), 0)
        # free values: classified strictly feasible by construction
        free = []
        seq = list(window.values)
        for _ in range(free_count):
            t = reciprocal_inf_ray(seq)
            x = F(t).limit_denominator(10 ** 9) * 2 + 1
            free.append(x)
            seq = [x] + seq
        ext, measure = extend_with_index(window, r, target_k, free)
        assert index(ext.values, Ray()) == target_k
        if measure is not None:
            assert measure.support_size == target_k
            for idx in range(ext.first_index, ext.last_index + 1):
                if measure.exact:
                    assert measure.moment(idx) == ext.at(idx)
                else:
                    want = float(ext.at(idx))
                    assert abs(float(measure.moment(idx)) - want) <= 1e-6 * max(1.0, abs(want))
        # the strict/forced pattern reproduces when reclassifying suffixes
        big_n = 2 * target_k - 1
        values = ext.values
        for pos in range(len(values) - 1):
            suffix = values[pos:]
            verdict = classify_ray(suffix)
            if len(suffix) <= big_n + 1:
                assert verdict.kind is PositivityClass.STRICTLY_POSITIVE
            else:
                assert verdict.kind is PositivityClass.SINGULARLY_POSITIVE


def test_phi_psi_examples():
    mu = minimal_measure_with_reciprocal([2, 3, 5], F(3, 2))
    assert mu.atoms == ((1, 1), (2, 1))
    assert reciprocal_moment(mu) == F(3, 2)
    with pytest.raises(OutOfRange):
        minimal_measure_with_reciprocal([2, 3, 5], 1)  # below the infimum 4/3


def test_phi_psi_bijection(rng):
    for _ in range(60):
        k = rng.randint(1, 3)
        mu = random_rational_measure(rng, k)
        window = moments(mu, 0, 2 * k - 2)
        x = reciprocal_moment(mu)
        back = minimal_measure_with_reciprocal(window, x)
        assert back == mu                      # psi(phi(mu)) = mu
        assert reciprocal_moment(back) == x    # phi(psi(x)) = x
        assert back.support_size == -((2 * k - 1) // -2)
