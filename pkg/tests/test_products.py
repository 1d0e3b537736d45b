import math
from fractions import Fraction

import pytest

from fliess_kit.errors import ComponentMismatch, TruncationMismatch
from fliess_kit.products import (
    compose,
    lie_bracket,
    mixed_compose,
    pre_lie,
    shuffle,
    shuffle_power,
)
from fliess_kit.series import (
    Series,
    add,
    coefficient,
    negate,
    random_rational_series,
    scale,
    subtract,
    worst_case_series,
)


def word(w, m=1, trunc=None):
    return Series.word_series(tuple(w), m=m, trunc=trunc)


def rand(L, seed, **kw):
    return random_rational_series(L, seed=seed, **kw)


# -- shuffle -------------------------------------------------------------------


def test_shuffle_unit_and_letters():
    c = rand(4, seed=[1, 0])
    one = Series.one(1, 4)
    assert shuffle(one, c, 4) == c
    assert shuffle(c, one, 4) == c
    assert shuffle(word((1,), trunc=2), word((1,), trunc=2), 2) == Series.from_terms(
        {(1, 1): Fraction(2)}, m=1, trunc=2
    )


def test_shuffle_worst_case_equality():
    kc, kd, M, L = Fraction(3, 2), Fraction(1, 3), Fraction(2), 6
    got = shuffle(worst_case_series(kc, M, L), worst_case_series(kd, M, L), L)
    for comp in got.components:
        for w, v in comp.items():
            n = len(w)
            assert v == kc * kd * M**n * math.factorial(n + 1)


def test_shuffle_commutative_associative():
    for i in range(4):
        a, b, c = (rand(5, seed=[2, i, k], density=0.5) for k in range(3))
        assert shuffle(a, b, 5) == shuffle(b, a, 5)
        assert shuffle(shuffle(a, b, 5), c, 5) == shuffle(a, shuffle(b, c, 5), 5)


def test_shuffle_shape_errors():
    a = rand(3, seed=1)
    b = random_rational_series(3, seed=2, m=2)
    with pytest.raises(ComponentMismatch):
        shuffle(a, b, 3)
    with pytest.raises(TruncationMismatch):
        shuffle(a, rand(3, seed=3), 4)


# -- compose -------------------------------------------------------------------


def test_compose_examples():
    d = rand(4, seed=[3, 0])
    one = Series.one(1, 4)
    assert compose(one, d, 4) == one
    assert compose(word((0,), trunc=4), d, 4) == word((0,), trunc=4)
    assert compose(word((1,), trunc=2), word((1,), trunc=2), 2) == Series.from_terms(
        {(0, 1): Fraction(1)}, m=1, trunc=2
    )


def test_compose_right_distributes_over_shuffle():
    for i in range(3):
        c = rand(5, seed=[4, i, 0], density=0.4)
        d = rand(5, seed=[4, i, 1], density=0.4)
        e = rand(5, seed=[4, i, 2], density=0.4)
        lhs = compose(shuffle(c, d, 5), e, 5)
        rhs = shuffle(compose(c, e, 5), compose(d, e, 5), 5)
        assert lhs == rhs


def test_compose_min_length_bookkeeping():
    c = Series.from_terms({(1, 1): Fraction(1), (0, 1, 1): Fraction(2)}, m=1, trunc=5)
    d = rand(5, seed=[5, 1])
    out = compose(c, d, 5)
    assert all(len(w) >= 2 for comp in out.components for w in comp)


# -- mixed composition -----------------------------------------------------------


def test_mixed_compose_examples():
    c = rand(4, seed=[6, 0])
    zero = Series.zero(1, 4)
    assert mixed_compose(c, zero, 4) == c

    d = rand(4, seed=[6, 1])
    xj = word((1,), trunc=4)
    got = mixed_compose(xj, d, 4)
    want = add(xj, Series(1, 4, ({(0,) + w: v for w, v in d.components[0].items() if len(w) < 4},), validate=False))
    assert got == want


def test_mixed_compose_two_letter_expansion():
    # x_j x_k against delta + d, spelled out term by term
    d = rand(4, seed=[7, 0], density=0.8)
    j = k = 1
    L = 4
    got = mixed_compose(word((j, k), trunc=L), d, L)

    d0 = d.components[0]
    x0d = Series(1, L, ({(0,) + w: v for w, v in d0.items() if len(w) < L},), validate=False)
    term1 = word((j, k), trunc=L)
    term2 = Series(1, L, ({(j, 0) + w: v for w, v in d0.items() if len(w) < L - 1},), validate=False)
    term3 = Series(
        1, L, ({(0,) + w: v for w, v in shuffle(d, word((k,), trunc=L - 1), L - 1).components[0].items()},), validate=False
    )
    term4 = Series(
        1, L, ({(0,) + w: v for w, v in shuffle(d, x0d, L - 1).components[0].items()},), validate=False
    )
    want = add(add(term1, term2), add(term3, term4))
    assert got == want


def _inverse_vandermonde(points):
    """Exact inverse of the Vandermonde matrix V[i][k] = points[i]**k."""
    n = len(points)
    A = [[Fraction(p) ** k for k in range(n)] for p in points]
    I = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        I[col], I[piv] = I[piv], I[col]
        inv = Fraction(1) / A[col][col]
        A[col] = [x * inv for x in A[col]]
        I[col] = [x * inv for x in I[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                I[r] = [x - f * y for x, y in zip(I[r], I[col])]
    return I


def test_mixed_compose_linearization():
    # c against delta + t*d is polynomial in t of degree <= L; its constant
    # term is c and its linear term is the pre-Lie product.
    L = 4
    c = rand(L, seed=[8, 0], density=0.6)
    d = rand(L, seed=[8, 1], density=0.6)
    points = list(range(L + 1))
    samples = [mixed_compose(c, scale(d, t), L) for t in points]
    Vinv = _inverse_vandermonde(points)

    def comb(row):
        out = Series.zero(1, L)
        for w, s in zip(Vinv[row], samples):
            out = add(out, scale(s, w))
        return out

    assert comb(0) == c
    assert comb(1) == pre_lie(c, d, L)


# -- pre-Lie and bracket ----------------------------------------------------------


def test_pre_lie_examples():
    d = rand(4, seed=[9, 0])
    for n in range(4):
        xn = word((0,) * n, trunc=4) if n else Series.one(1, 4)
        if n:
            assert pre_lie(xn, d, 4).is_zero()
    assert pre_lie(Series.one(1, 4), d, 4).is_zero()

    got = pre_lie(word((1,), trunc=4), d, 4)
    want = Series(1, 4, ({(0,) + w: v for w, v in d.components[0].items() if len(w) < 4},), validate=False)
    assert got == want

    got2 = pre_lie(word((1, 1), trunc=4), d, 4)
    d0 = d.components[0]
    t1 = Series(1, 4, ({(1, 0) + w: v for w, v in d0.items() if len(w) < 3},), validate=False)
    t2 = Series(
        1, 4, ({(0,) + w: v for w, v in shuffle(word((1,), trunc=3), d, 3).components[0].items()},), validate=False
    )
    assert got2 == add(t1, t2)


def test_pre_lie_length_homogeneous():
    c = rand(4, seed=[10, 0], density=0.6)
    d = rand(4, seed=[10, 1], density=0.6)
    out = pre_lie(c, d, 4)
    lengths_c = {len(w) for w in c.components[0]}
    for w, _ in out.components[0].items():
        # every output length splits as |c word| + |d word| with |c word| >= 1
        assert any(
            len(w) - lc in {len(wd) for wd in d.components[0]} for lc in lengths_c if lc >= 1
        )


def test_right_pre_lie_identity():
    # associator symmetric in the last two arguments
    L = 4
    for i in range(3):
        a = rand(L, seed=[11, i, 0], density=0.5)
        b = rand(L, seed=[11, i, 1], density=0.5)
        c = rand(L, seed=[11, i, 2], density=0.5)
        lhs = subtract(pre_lie(pre_lie(a, b, L), c, L), pre_lie(a, pre_lie(b, c, L), L))
        rhs = subtract(pre_lie(pre_lie(a, c, L), b, L), pre_lie(a, pre_lie(c, b, L), L))
        assert lhs == rhs


def test_bracket_examples_and_jacobi():
    c = rand(4, seed=[12, 0])
    assert lie_bracket(c, c, 4).is_zero()

    x0, x1 = word((0,), trunc=2), word((1,), trunc=2)
    assert lie_bracket(x1, x0, 2) == Series.from_terms({(0, 0): Fraction(1)}, m=1, trunc=2)

    L = 4
    a = rand(L, seed=[13, 0], density=0.5)
    b = rand(L, seed=[13, 1], density=0.5)
    e = rand(L, seed=[13, 2], density=0.5)
    jac = add(
        add(
            lie_bracket(lie_bracket(a, b, L), e, L),
            lie_bracket(lie_bracket(b, e, L), a, L),
        ),
        lie_bracket(lie_bracket(e, a, L), b, L),
    )
    assert jac.is_zero()


def test_shuffle_power_helper():
    c = word((1,), trunc=4)
    assert shuffle_power(c, 0, 4) == Series.one(1, 4)
    assert coefficient(shuffle_power(c, 4, 4), (1, 1, 1, 1))[0] == 24
