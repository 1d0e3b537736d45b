from fractions import Fraction

import pytest

from fliess_kit.errors import (
    DuplicateWordError,
    QueryBeyondTruncation,
    SeriesSyntaxError,
)
from fliess_kit.series import (
    GrowthEstimate,
    Series,
    add,
    coefficient,
    extend_truncation,
    linf_norm,
    max_abs_coefficient,
    parse_series,
    random_ball_series,
    random_rational_series,
    serialize_series,
    subtract,
    worst_case_series,
)


def test_coefficient_and_truncation_contract():
    c = Series.from_terms({(0, 1): Fraction(3)}, m=1, trunc=2)
    assert coefficient(c, (0, 1)) == (Fraction(3),)
    assert coefficient(c, (1,)) == (0,)
    with pytest.raises(QueryBeyondTruncation):
        coefficient(c, (0, 0, 0))
    with pytest.raises(QueryBeyondTruncation):
        c.truncated(3)


def test_canonical_sparsity_and_equality():
    a = Series.from_terms({(1,): Fraction(1), (0,): Fraction(0)}, m=1, trunc=2)
    assert (0,) not in a.components[0]
    b = Series.from_terms({(1,): Fraction(1)}, m=1, trunc=3)
    assert a == b  # map equality; truncation is knowledge, not content
    assert subtract(a, b).is_zero()


def test_linf_norm_examples():
    zero = Series.zero(1, 3)
    assert linf_norm(zero, 1) == 0
    wc = worst_case_series(2, 1, 4)
    assert linf_norm(wc, 1) == 2
    c = Series.from_terms({(0, 1): Fraction(1)}, m=1, trunc=2)
    assert linf_norm(c, 2) == Fraction(1, 8)


def test_worst_case_series_shape():
    c = worst_case_series(1, 1, 1)
    assert coefficient(c, ()) == (1,)
    assert coefficient(c, (0,)) == (1,)
    assert coefficient(c, (1,)) == (1,)
    c2 = worst_case_series(1, 2, 2)
    assert coefficient(c2, (0, 1))[0] == 8  # 2^2 * 2!
    assert linf_norm(c2, 2) == 1


def test_random_ball_series_contract():
    c1 = random_ball_series(1.5, 1, 4, seed=42)
    c2 = random_ball_series(1.5, 1, 4, seed=42)
    assert c1 == c2
    assert linf_norm(c1, 1) <= 1.5
    assert random_ball_series(0, 1, 3, seed=1).is_zero()


def test_norm_triangle_and_weight_monotonicity():
    for i in range(5):
        a = random_ball_series(1, 1, 4, seed=[9, i, 0])
        b = random_ball_series(1, 1, 4, seed=[9, i, 1])
        lhs = linf_norm(add(a, b), 1)
        assert lhs <= linf_norm(a, 1) + linf_norm(b, 1) + 1e-12
        assert linf_norm(a, 2) <= linf_norm(a, 1)


def test_parse_examples():
    c = parse_series("3/2 x0x1")
    assert coefficient(c, (0, 1)) == (Fraction(3, 2),)
    one = parse_series("1 e")
    assert coefficient(one, ()) == (Fraction(1),)
    with pytest.raises(SeriesSyntaxError):
        parse_series("1 x9", m=1)


def test_parse_error_reports_line():
    text = "1 e\n2 zz"
    with pytest.raises(SeriesSyntaxError) as err:
        parse_series(text)
    assert err.value.line == 2


def test_parse_duplicate_word():
    with pytest.raises(DuplicateWordError):
        parse_series("1 x0\n2 x0")
    # same word on different components is fine
    c = parse_series("[1]1 x0\n[2]2 x0")
    assert c.ell == 2


def test_round_trip_identity():
    c = random_rational_series(3, seed=5, m=1, ell=2, density=0.8)
    text = serialize_series(c)
    assert parse_series(text) == c
    assert serialize_series(parse_series(text)) == text

    f = random_ball_series(1, 1, 3, seed=8)
    text_f = serialize_series(f)
    assert serialize_series(parse_series(text_f)) == text_f


def test_parse_mode_handling():
    assert isinstance(parse_series("0.5 x0").components[0][(0,)], float)
    with pytest.raises(SeriesSyntaxError):
        parse_series("0.5 x0\n1/2 x1")
    forced = parse_series("0.5 x0\n1/2 x1", mode="float")
    assert forced.components[0][(1,)] == 0.5


def test_extend_truncation_is_explicit():
    c = random_rational_series(2, seed=3)
    wider = extend_truncation(c, 5)
    assert wider.trunc == 5
    assert coefficient(wider, (0, 0, 0)) == (0,)
    assert max_abs_coefficient(wider) == max_abs_coefficient(c)


def test_growth_estimate():
    c = worst_case_series(Fraction(3, 2), 1, 3)
    g = GrowthEstimate.fit(c, 1)
    assert g.K == Fraction(3, 2)
    assert g.admits(c)
    with pytest.raises(ValueError):
        GrowthEstimate(-1, 1)
