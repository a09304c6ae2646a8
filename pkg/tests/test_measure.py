import json
import random
from fractions import Fraction as F

import pytest

from momentkit.errors import DegenerateInput, ShapeError
from momentkit.measure import (AtomicMeasure, MomentRecurrence, MomentSequence,
                               moment, moments, tilt)
from momentkit.numeric import Polynomial
from conftest import random_rational_measure


def test_moment_examples():
    assert moment(AtomicMeasure([(1, 1)]), 5) == 1
    two = AtomicMeasure([(1, 1), (2, 1)])
    assert moment(two, 3) == 9
    assert moment(two, -1) == F(3, 2)


def test_moments_examples():
    two = AtomicMeasure([(1, 1), (2, 1)])
    assert moments(two, 0, 3).values == (2, 3, 5, 9)
    assert moments(AtomicMeasure([(1, 1)]), 0, 2).values == (1, 1, 1)
    mix = AtomicMeasure([(F(1, 2), 2), (1, 1)])
    assert moments(mix, 0, 2).values == (3, 2, F(3, 2))


def test_tilt_examples():
    assert tilt(AtomicMeasure([(2, 3)]), 1).atoms == ((2, 6),)
    two = AtomicMeasure([(1, 1), (2, 1)])
    assert tilt(two, -1).atoms == ((1, 1), (2, F(1, 2)))
    assert tilt(two, 0) == two


def test_tilt_moment_identity(rng):
    for _ in range(500):
        mu = random_rational_measure(rng, rng.randint(1, 3))
        k = rng.randint(-3, 3)
        m = rng.randint(-3, 3)
        assert moment(tilt(mu, k), m) == moment(mu, m + k)


def test_total_mass_and_linearity(rng):
    for _ in range(50):
        mu = random_rational_measure(rng, rng.randint(1, 3))
        assert moment(mu, 0) == mu.total_mass()
        doubled = AtomicMeasure([(p, 2 * m) for p, m in mu.atoms])
        assert moment(doubled, 2) == 2 * moment(mu, 2)


def test_atom_merging_and_validation():
    merged = AtomicMeasure([(1, 1), (F(2, 2), 2)])
    assert merged.atoms == ((1, 3),)
    with pytest.raises(DegenerateInput):
        AtomicMeasure([(0, 1)])
    with pytest.raises(DegenerateInput):
        AtomicMeasure([(1, 0)])


def test_json_round_trip():
    mu = AtomicMeasure([(F(3, 2), 2), (4, F(1, 3))])
    blob = json.dumps(mu.to_json())
    back = AtomicMeasure.from_json(json.loads(blob))
    assert back == mu


def test_moment_sequence_windows():
    s = MomentSequence(-1, [F(3, 2), 2, 3, 5])
    assert s.at(-1) == F(3, 2)
    assert s.window(0, 2) == (2, 3, 5)
    assert s.prepend(F(9, 8)).first_index == -2
    with pytest.raises(DegenerateInput):
        MomentSequence(0, [1, -1])
    with pytest.raises(ShapeError):
        MomentSequence(0, [])


def test_moment_recurrence_matches_atoms(rng):
    for _ in range(40):
        mu = random_rational_measure(rng, rng.randint(1, 3))
        poly = Polynomial([1])
        for pos, _ in mu.atoms:
            poly = poly.mul_linear(-pos, 1)
        lo = -2
        window = [mu.moment(k) for k in range(lo, lo + poly.degree + 2)]
        rec = MomentRecurrence(poly, lo, window)
        for k in range(-5, 9):
            assert rec.moment(k) == mu.moment(k)
