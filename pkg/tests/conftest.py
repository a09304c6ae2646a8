import random
from fractions import Fraction

import pytest

from momentkit.measure import AtomicMeasure


def rational(rng, num_max=24, den_max=12):
    return Fraction(rng.randint(1, num_max), rng.randint(1, den_max))


def random_rational_measure(rng, atoms, num_max=24, den_max=12,
                            mass_num_max=12, mass_den_max=8):
    positions = set()
    while len(positions) < atoms:
        positions.add(rational(rng, num_max, den_max))
    pairs = [(p, Fraction(rng.randint(1, mass_num_max), rng.randint(1, mass_den_max)))
             for p in sorted(positions)]
    return AtomicMeasure(pairs)


def random_half_open_measure(rng, atoms, include_one=False):
    positions = set()
    if include_one:
        positions.add(Fraction(1))
    while len(positions) < atoms:
        num = rng.randint(1, 16)
        den = rng.randint(num + 1, num + 16)  # interior atoms stay below 1
        positions.add(Fraction(num, den))
    pairs = [(p, Fraction(rng.randint(1, 12), rng.randint(1, 8)))
             for p in sorted(positions)]
    return AtomicMeasure(pairs)


@pytest.fixture
def rng():
    return random.Random(20260809)
