import math

import mpmath
import numpy as np
import pytest
import sympy
from sympy import Poly

from qarith import (
    AlgebraicReal,
    BoundError,
    QRational,
    compare,
    exact_compare,
    field_of,
    index_to_q,
    is_algebraic_integer,
    minimal_polynomial_of,
    parse_bound,
    polys_equal,
    q_to_index,
    quantum_int,
    x,
)


def test_quantum_integers_numeric():
    assert quantum_int(2, 2.0) == pytest.approx(2.5)
    assert quantum_int(3, 2.0) == pytest.approx(4 + 1 + 0.25)
    assert quantum_int(5, 1.0) == 5.0


def test_quantum_integers_symbolic():
    assert quantum_int(2) == QRational.from_expr((sympy.Symbol("q") ** 2 + 1) / sympy.Symbol("q"))
    assert quantum_int(3).exact_at(2) == sympy.Rational(21, 4)
    assert quantum_int(0) == QRational.make(0)


def test_rational_function_derivative_and_eval():
    f = QRational.var() ** 2
    assert f.derivative() == 2 * QRational.var()
    g = quantum_int(5) / quantum_int(2) ** 3
    assert g(1.7) == pytest.approx(quantum_int(5, 1.7) / quantum_int(2, 1.7) ** 3)


def test_index_q_conversions():
    assert index_to_q(6.2) == pytest.approx(1.98661, abs=1e-5)
    assert index_to_q(3 + math.sqrt(5)) == pytest.approx(1.70002, abs=1e-5)
    assert q_to_index(index_to_q(5.5)) == pytest.approx(5.5)
    with pytest.raises(BoundError):
        index_to_q(3.9)


@pytest.mark.parametrize(
    "token,value",
    [
        ("31/5", 6.2),
        ("6", 6.0),
        ("3+sqrt5", 3 + math.sqrt(5)),
        ("3+2sqrt2", 3 + 2 * math.sqrt(2)),
        ("sqrt2", math.sqrt(2)),
        ("3sqrt2", 3 * math.sqrt(2)),
        ("3+sqrt4", 5.0),
    ],
)
def test_parse_bound(token, value):
    assert float(parse_bound(token)) == pytest.approx(value, abs=1e-12)


@pytest.mark.parametrize("token", ["abc", "3+", "1/0", "sqrt"])
def test_parse_bound_rejects(token):
    with pytest.raises(BoundError):
        parse_bound(token)


def test_exact_comparisons():
    assert parse_bound("31/5").is_rational
    assert compare(parse_bound("3+2sqrt2"), parse_bound("31/5")) == "LT"
    assert compare(parse_bound("3+sqrt5"), parse_bound("3+sqrt5")) == "EQ"
    assert compare(parse_bound("13/2"), parse_bound("3+2sqrt2")) == "GT"
    root2 = AlgebraicReal.largest_root(Poly(x**2 - 2, x))
    assert exact_compare(root2, sympy.Rational(7, 5)) == "GT"
    assert exact_compare(root2, sympy.Rational(3, 2)) == "LT"


def test_largest_root_keeps_minimal_factor():
    # (x^2 - 2)(x - 1) has largest root sqrt2, whose minimal polynomial is x^2 - 2
    r = AlgebraicReal.largest_root(Poly((x**2 - 2) * (x - 1), x))
    assert r.degree == 2
    assert float(r) == pytest.approx(math.sqrt(2))


def test_number_field_and_integrality():
    k = field_of(parse_bound("3+2sqrt2"))
    t = k.gen()
    assert is_algebraic_integer(t)
    assert not is_algebraic_integer(t / 2)
    assert polys_equal(minimal_polynomial_of(t), Poly(x**2 - 6 * x + 1, x))
    assert (t - 6).sign() == -1
    assert float(t * t - 6 * t) == pytest.approx(-1.0)
    assert t.inverse() * t == k.one()


def test_quantum_integer_recursion_at_random_q():
    rng = np.random.default_rng(31)
    two = quantum_int(2)
    for k in range(1, 7):
        assert quantum_int(k + 1) == two * quantum_int(k) - quantum_int(k - 1)
    for _ in range(50):
        qv = float(rng.uniform(1.001, 3.0))
        den = int(rng.integers(2, 50))
        qr = sympy.Rational(int(rng.integers(den + 1, 3 * den)), den)
        for k in range(1, 9):
            expected = quantum_int(2, qv) * quantum_int(k, qv) - quantum_int(k - 1, qv)
            assert quantum_int(k + 1, qv) == pytest.approx(expected, rel=1e-10)
            exact = two.exact_at(qr) * quantum_int(k).exact_at(qr) - quantum_int(k - 1).exact_at(qr)
            assert quantum_int(k + 1).exact_at(qr) == exact


def test_exact_compare_agrees_with_sixty_digits():
    rng = np.random.default_rng(5656)
    seen = 0
    while seen < 100:
        n, deg = int(rng.integers(2, 80)), int(rng.integers(2, 4))
        root = n ** (1.0 / deg)
        if round(root) ** deg == n:
            continue
        a = AlgebraicReal.largest_root(x**deg - n)
        # rationals within a few units of the root at the chosen denominator
        den = int(rng.integers(1, 10**6))
        num = int(round(root * den)) + int(rng.integers(-2, 3))
        with mpmath.workdps(60):
            diff = a.to_mpf(60) - mpmath.mpf(num) / den
        assert exact_compare(a, sympy.Rational(num, den)) == ("LT" if diff < 0 else "GT")
        seen += 1
