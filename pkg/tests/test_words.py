import math

import pytest

from fliess_kit.errors import SeriesSyntaxError
from fliess_kit.words import (
    degree,
    enumerate_words,
    format_word,
    parse_word,
    shuffle_words,
    words_up_to,
)


def naive_shuffle(nu, xi, acc=None):
    """Defining recursion, used as the independent oracle."""
    if not nu:
        return {xi: 1}
    if not xi:
        return {nu: 1}
    out = {}
    for w, k in naive_shuffle(nu[1:], xi).items():
        w = (nu[0],) + w
        out[w] = out.get(w, 0) + k
    for w, k in naive_shuffle(nu, xi[1:]).items():
        w = (xi[0],) + w
        out[w] = out.get(w, 0) + k
    return out


def test_enumerate_lengths_and_order():
    assert enumerate_words(1, 0) == [()]
    assert enumerate_words(1, 1) == [(0,), (1,)]
    assert len(enumerate_words(1, 3)) == 8
    ws = enumerate_words(2, 2)
    assert ws == sorted(ws)
    assert len(ws) == 9


def test_degree_grading():
    assert degree(()) == 1
    assert degree((0,)) == 3
    assert degree((1, 0, 1)) == 2 + 2 + 1
    # m > 1 extension: every non-x0 letter counts once
    assert degree((2, 0)) == 2 + 1 + 1


def test_shuffle_basic_examples():
    assert shuffle_words((0,), (1,)) == {(0, 1): 1, (1, 0): 1}
    assert shuffle_words((1,), (1,)) == {(1, 1): 2}
    for w in [(), (0,), (1, 0, 1)]:
        assert shuffle_words((), w) == {w: 1}
        assert shuffle_words(w, ()) == {w: 1}


def test_shuffle_matches_defining_recursion():
    words = words_up_to(1, 3)
    for nu in words:
        for xi in words:
            assert shuffle_words(nu, xi) == naive_shuffle(nu, xi)


def test_shuffle_commutative_and_homogeneous_up_to_length_5():
    words = words_up_to(1, 5)
    for nu in words:
        for xi in words:
            if len(nu) + len(xi) > 5:
                continue
            got = shuffle_words(nu, xi)
            assert got == shuffle_words(xi, nu)
            total = len(nu) + len(xi)
            assert all(len(w) == total for w in got)
            assert sum(got.values()) == math.comb(total, len(nu))


def test_letter_powers():
    # x_i^{sh n} = n! x_i^n, built up one factor at a time
    for i in (0, 1):
        acc = {(): 1}
        for n in range(1, 7):
            nxt = {}
            for w, k in acc.items():
                for ww, kk in shuffle_words(w, (i,)).items():
                    nxt[ww] = nxt.get(ww, 0) + k * kk
            acc = nxt
            assert acc == {(i,) * n: math.factorial(n)}


def test_word_text_round_trip():
    for text in ("e", "x0", "x1x0x1", "x2x2"):
        assert format_word(parse_word(text)) == text
    assert parse_word("e") == ()


@pytest.mark.parametrize("bad", ["", "x", "x01", "e e", "X0", "x0 x1", "ex0"])
def test_word_parse_strict(bad):
    with pytest.raises(SeriesSyntaxError):
        parse_word(bad)
