from fractions import Fraction

import pytest

from fliess_kit.errors import SeriesSyntaxError
from fliess_kit.poly import Polynomial, parse_polynomial, variables


def test_arithmetic_and_equality():
    x, y = variables("x y")
    p = (x + y) * (x - y)
    assert p == x**2 - y**2
    assert p - p == Polynomial.constant(0)
    assert 2 * x == x + x
    assert (x + 1) ** 3 == x**3 + 3 * x**2 + 3 * x + 1


def test_laurent_monomials():
    x, y = variables("x y")
    ratio = x / y
    assert ratio * y == x
    assert ratio.evaluate({"x": 6, "y": 3}) == 2
    with pytest.raises(ValueError):
        (x + y).reciprocal()


def test_diff():
    x, y = variables("x y")
    p = x**3 * y + 2 * x
    assert p.diff("x") == 3 * x**2 * y + 2
    assert p.diff("y") == x**3
    assert p.diff("z") == Polynomial.constant(0)


def test_subs_and_evaluate():
    x, y = variables("x y")
    p = x**2 + y
    assert p.subs({"x": y}) == y**2 + y
    assert p.subs({"x": Fraction(1, 2)}) == y + Fraction(1, 4)
    assert p.evaluate({"x": 2.0, "y": 1.0}) == 5.0


def test_univariate_coeffs():
    (k,) = variables("K")
    p = 3 * k**2 - k + 5
    assert p.univariate_coeffs("K") == [Fraction(5), Fraction(-1), Fraction(3)]
    x, y = variables("x y")
    with pytest.raises(ValueError):
        (x * y).univariate_coeffs("x")


def test_parse_round_trip():
    for text in ("(M/K)*(z^2 - z^3)", "1/2*K^2 - 3*K + 7", "-(x - 1)*(x + 1)"):
        p = parse_polynomial(text)
        assert parse_polynomial(str(p)) == p


def test_parse_errors():
    with pytest.raises(SeriesSyntaxError):
        parse_polynomial("1/(1+K)")
    with pytest.raises(SeriesSyntaxError):
        parse_polynomial("K^(1/2)")
    with pytest.raises(SeriesSyntaxError):
        parse_polynomial("2 +")
