import random
from fractions import Fraction as F

import numpy as np
import pytest

from momentkit.errors import DegenerateInput, InsufficientMoments, ShapeError
from momentkit.numeric import (FormClass, Polynomial, SymMatrix, classify_form,
                               det, det_poly, hankel, parse_scalar, format_scalar,
                               real_roots, simplest_between, solve_linear,
                               vandermonde_masses)
from conftest import random_rational_measure


def test_hankel_layout():
    assert hankel([2, 3, 5, 9], 0, 2).rows == ((2, 3), (3, 5))
    assert hankel([2, 3, 5, 9], 1, 2).rows == ((3, 5), (5, 9))
    assert hankel([1], 0, 1).rows == ((1,),)


def test_hankel_window_too_short():
    with pytest.raises(InsufficientMoments):
        hankel([1, 2, 3], 1, 2)


def test_hankel_symmetry(rng):
    for _ in range(50):
        vals = [F(rng.randint(0, 9)) for _ in range(rng.randint(1, 9))]
        order = (len(vals) + 1) // 2
        m = hankel(vals, 0, order)
        for i in range(order):
            for j in range(order):
                assert m.entry(i, j) == m.entry(j, i)


def test_classify_form_examples():
    assert classify_form(SymMatrix([[2, 3], [3, 5]])).kind is FormClass.POSITIVE_DEFINITE
    assert classify_form(SymMatrix([[0]])).kind is FormClass.POSITIVE_SEMIDEFINITE_SINGULAR
    assert classify_form(SymMatrix([[1, 2], [2, 1]])).kind is FormClass.INDEFINITE


def test_classify_form_witnesses():
    m = SymMatrix([[1, 1, 0], [1, 1, 1], [0, 1, 1]])  # only the 3x3 minor is negative
    v = classify_form(m)
    assert v.kind is FormClass.INDEFINITE
    assert m.quadratic_form(v.negative_witness) < 0
    s = SymMatrix([[1, 1], [1, 1]])
    v = classify_form(s)
    kv = v.kernel
    assert all(sum(s.entry(i, j) * kv[j] for j in range(2)) == 0 for i in range(2))


def test_classify_form_against_eigenvalues():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 5)
        base = [[rng.uniform(-2, 2) for _ in range(n)] for _ in range(n)]
        m = [[base[i][j] + base[j][i] for j in range(n)] for i in range(n)]
        got = classify_form(SymMatrix(m), eps=1e-9).kind
        eig = np.linalg.eigvalsh(np.array(m))
        tol = 1e-9 * max(1.0, float(np.abs(np.array(m)).max()))
        if eig.min() > tol:
            want = FormClass.POSITIVE_DEFINITE
        elif eig.min() < -tol:
            want = FormClass.INDEFINITE
        else:
            want = FormClass.POSITIVE_SEMIDEFINITE_SINGULAR
        assert got is want


def test_det_poly_examples():
    q = det_poly([[2, 3], [3, 5], [5, 9]])
    assert q.coeffs == (F(2), F(-3), F(1))
    assert det_poly([[1], [1]]).coeffs == (F(-1), F(1))
    assert det_poly([[5], [9]]).coeffs == (F(-9), F(5))


def test_det_poly_shape_error():
    with pytest.raises(ShapeError):
        det_poly([[1, 2], [3]])


def test_det_poly_vanishes_at_atoms(rng):
    # the bordered determinant annihilates every atom of the generating measure
    for _ in range(200):
        mu = random_rational_measure(rng, rng.randint(1, 3))
        k = mu.support_size
        window = [mu.moment(i) for i in range(2 * k)]
        rows = [[window[i + j] for j in range(k)] for i in range(k + 1)]
        q = det_poly(rows)
        for pos, _ in mu.atoms:
            assert q(pos) == 0


def test_real_roots_examples():
    assert real_roots(Polynomial([2, -3, 1]), F(1, 2), 4) == [1, 2]
    assert real_roots(Polynomial([-1, 1]), 0, 2) == [1]
    assert real_roots(Polynomial([-9, 5]), 1, 2) == [F(9, 5)]


def test_real_roots_irrational_enclosure():
    (r,) = real_roots(Polynomial([-2, 0, 1]), 0, 2)
    assert abs(float(r) - 2 ** 0.5) < 1e-11


def test_real_roots_repeated_root_rejected():
    with pytest.raises(DegenerateInput):
        real_roots(Polynomial([1, -2, 1]), 0, 2)  # (t-1)^2


def test_real_roots_count_for_principal_polynomials(rng):
    # strictly positive windows make the bordered polynomial split with
    # exactly deg simple roots
    from momentkit.principal import bordered_hankel_poly, root_bound
    for _ in range(60):
        mu = random_rational_measure(rng, rng.randint(1, 4))
        k = mu.support_size
        window = [mu.moment(i) for i in range(2 * k)]
        q = bordered_hankel_poly(window)
        roots = real_roots(q, 0, root_bound(q))
        assert len(roots) == q.degree == k


def test_real_roots_endpoints():
    q = Polynomial([0, -3, 1]).mul_linear(1, 0)  # placeholder: t(t-3)*1
    roots = real_roots(Polynomial([2, -3, 1]), 1, 2)  # both endpoints are roots
    assert roots == [1, 2]


def test_simplest_between():
    assert simplest_between(F(199, 100), F(201, 100)) == 2
    assert simplest_between(F(49, 100), F(52, 100)) == F(1, 2)
    assert simplest_between(F(1, 3), F(1, 3)) == F(1, 3)
    assert simplest_between(F(-3, 2), F(5, 2)) == 0


def test_det_and_solve(rng):
    for _ in range(40):
        n = rng.randint(1, 4)
        rows = [[F(rng.randint(-5, 5)) for _ in range(n)] for _ in range(n)]
        exact = det(rows)
        approx = np.linalg.det(np.array([[float(x) for x in r] for r in rows]))
        assert abs(float(exact) - approx) < 1e-6 * max(1.0, abs(approx))
        if exact != 0:
            rhs = [F(rng.randint(-5, 5)) for _ in range(n)]
            x = solve_linear(rows, rhs)
            for i in range(n):
                assert sum(rows[i][j] * x[j] for j in range(n)) == rhs[i]


def test_vandermonde_masses():
    masses = vandermonde_masses([F(1), F(2)], [F(2), F(3)])
    assert masses == [F(1), F(1)]


def test_parse_format_scalar():
    assert parse_scalar("3/2") == F(3, 2)
    assert parse_scalar("0.1") == F(1, 10)
    assert isinstance(parse_scalar("0.1", exact=False), float)
    assert format_scalar(F(3, 2)) == "3/2"
    assert format_scalar(F(4, 2)) == "2"
