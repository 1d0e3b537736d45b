import math
from fractions import Fraction

import pytest

from fliess_kit.errors import ProperSeriesError, UnsupportedArity
from fliess_kit.groups import (
    UnitalSeries,
    feedback,
    group_inverse,
    group_product,
    inverse_x0_profile,
    shuffle_inverse,
    shuffle_quotient,
)
from fliess_kit.products import mixed_compose, shuffle
from fliess_kit.series import (
    Series,
    add,
    coefficient,
    negate,
    random_rational_series,
    worst_case_series,
)
from fliess_kit.words import degree, words_up_to


def rand(L, seed, **kw):
    return random_rational_series(L, seed=seed, **kw)


def unital(L, seed, **kw):
    return UnitalSeries(rand(L, seed=seed, **kw))


# -- shuffle group ---------------------------------------------------------------


def test_shuffle_inverse_scalars():
    one = Series.one(1, 3)
    assert shuffle_inverse(one, 3) == one
    two = Series.from_terms({(): Fraction(2)}, m=1, trunc=3)
    assert shuffle_inverse(two, 3) == Series.from_terms({(): Fraction(1, 2)}, m=1, trunc=3)


def test_shuffle_inverse_geometric():
    L = 6
    c = Series.from_terms({(): Fraction(1), (1,): Fraction(-1)}, m=1, trunc=L)
    inv = shuffle_inverse(c, L)
    # round-trip oracle first, then the closed form it certifies
    assert shuffle(c, inv, L) == Series.one(1, L)
    for k in range(L + 1):
        assert coefficient(inv, (1,) * k)[0] == math.factorial(k)


def test_shuffle_inverse_requires_nonproper():
    with pytest.raises(ProperSeriesError):
        shuffle_inverse(Series.word_series((1,), trunc=2), 2)


def test_shuffle_quotient():
    L = 5
    c = rand(L, seed=[20, 0])
    one = Series.one(1, L)
    assert shuffle_quotient(c, one, L) == c
    d = rand(L, seed=[20, 1], unit_constant=True)
    assert shuffle_quotient(d, d, L) == one
    assert shuffle_quotient(one, Series.from_terms({(): Fraction(1), (1,): Fraction(-1)}, m=1, trunc=L), L) == shuffle_inverse(
        Series.from_terms({(): Fraction(1), (1,): Fraction(-1)}, m=1, trunc=L), L
    )


def test_shuffle_group_axioms_sampled():
    L = 8
    one = Series.one(1, L)
    for i in range(5):
        c = rand(L, seed=[21, i], density=0.35, unit_constant=True)
        inv = shuffle_inverse(c, L)
        assert shuffle(c, inv, L) == one
        assert shuffle(inv, c, L) == one


# -- output-feedback group ---------------------------------------------------------


def test_group_product_identities():
    N = 5
    a = unital(N, seed=[22, 0])
    e = UnitalSeries.identity(1, N)
    assert group_product(a, e, N) == a
    assert group_product(e, a, N) == a

    d = rand(N, seed=[22, 1])
    xj = UnitalSeries(Series.word_series((1,), m=1, trunc=N))
    got = group_product(xj, UnitalSeries(d), N)
    want = add(d, add(Series.word_series((1,), m=1, trunc=N),
                      Series(1, N, ({(0,) + w: v for w, v in d.components[0].items() if len(w) < N},), validate=False)))
    assert got.body == want


def test_group_inverse_round_trip():
    N = 5
    e = UnitalSeries.identity(1, N)
    assert group_inverse(e, N) == e
    for i in range(5):
        a = unital(N, seed=[23, i], density=0.6)
        inv = group_inverse(a, N)
        assert group_product(a, inv, N).body.is_zero()
        assert group_product(inv, a, N).body.is_zero()


def test_group_associativity_and_antimorphism():
    N = 5
    a, b, c = (unital(N, seed=[24, k], density=0.5) for k in range(3))
    assert group_product(group_product(a, b, N), c, N) == group_product(a, group_product(b, c, N), N)
    lhs = group_inverse(group_product(a, b, N), N)
    rhs = group_product(group_inverse(b, N), group_inverse(a, N), N)
    assert lhs == rhs


def test_inverse_coefficients_respect_degree_grading():
    # bumping a high-degree coefficient of c must not move low-degree
    # coefficients of the inverse
    N = 4
    c = rand(N, seed=[25, 0], density=0.7)
    bump_word = (0, 0)  # degree 5
    bumped_terms = dict(c.components[0])
    bumped_terms[bump_word] = bumped_terms.get(bump_word, Fraction(0)) + Fraction(7, 3)
    c_bumped = Series(1, N, (bumped_terms,), validate=False)

    inv = group_inverse(UnitalSeries(c), N).body
    inv_bumped = group_inverse(UnitalSeries(c_bumped), N).body
    cutoff = degree(bump_word)
    for w in words_up_to(1, N):
        if degree(w) < cutoff:
            assert coefficient(inv, w) == coefficient(inv_bumped, w)


def test_inverse_x0_profile_matches_full_inverse():
    N = 5
    cbar = worst_case_series(Fraction(2, 3), Fraction(3, 2), N)
    full = group_inverse(UnitalSeries(cbar), N).body
    prof = inverse_x0_profile(UnitalSeries(cbar), N)
    for k in range(N + 1):
        assert coefficient(full, (0,) * k)[0] == prof[k]

    c = rand(N, seed=[26, 0], density=0.8)
    full2 = group_inverse(UnitalSeries(c), N).body
    prof2 = inverse_x0_profile(UnitalSeries(c), N)
    for k in range(N + 1):
        assert coefficient(full2, (0,) * k)[0] == prof2[k]


def test_feedback_with_zero_path():
    L = 4
    c = rand(L, seed=[27, 0])
    zero = Series.zero(1, L)
    assert feedback(c, zero, L) == c


def test_unity_feedback_identity():
    # the inverse body is a fixed point of mixed composition with -c
    L = 5
    for i in range(3):
        c = rand(L, seed=[28, i], density=0.6)
        inv_body = group_inverse(UnitalSeries(c), L).body
        assert mixed_compose(negate(c), inv_body, L) == inv_body


def test_feedback_requires_siso():
    c = random_rational_series(3, seed=1, m=2, ell=2)
    with pytest.raises(UnsupportedArity):
        feedback(c, c, 3)
    with pytest.raises(UnsupportedArity):
        inverse_x0_profile(UnitalSeries(c), 3)
