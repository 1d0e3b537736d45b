"""Alphabet and word combinatorics.

A word over the alphabet {x0, ..., xm} is represented as a tuple of letter
indices, e.g. (0, 1, 1) for x0x1x1; the empty tuple is the empty word.
Words are immutable value objects ordered by (length, letters), which fixes
deterministic serialization and map iteration everywhere else.
"""

from __future__ import annotations

import itertools
import re

from .errors import SeriesSyntaxError

Word = tuple  # tuple[int, ...]; letter j stands for the symbol x_j

EMPTY_WORD: Word = ()

_WORD_RE = re.compile(r"(x\d)+")


def validate_word(word: Word, m: int) -> None:
    """Raise if any letter index exceeds the alphabet max index m."""
    for letter in word:
        if not 0 <= letter <= m:
            raise SeriesSyntaxError(
                f"letter x{letter} outside alphabet x0..x{m} in word {format_word(word)}"
            )


def enumerate_words(m: int, k: int) -> list[Word]:
    """All (m+1)**k words of length k, in lexicographic letter order."""
    if m < 0 or k < 0:
        raise ValueError("need m >= 0 and k >= 0")
    return list(itertools.product(range(m + 1), repeat=k))


def words_up_to(m: int, length: int) -> list[Word]:
    """All words of length 0..length, shortest first, lexicographic within a length."""
    out: list[Word] = []
    for k in range(length + 1):
        out.extend(enumerate_words(m, k))
    return out


def x0_count(word: Word) -> int:
    return sum(1 for letter in word if letter == 0)


def degree(word: Word) -> int:
    """Grading 2*|word|_{x0} + (#non-x0 letters) + 1 used to order inverse sweeps.

    For the two-letter alphabet this is the coordinate-function grading; for
    m > 1 every non-x0 letter counts with weight one (see module notes).
    """
    zeros = x0_count(word)
    return 2 * zeros + (len(word) - zeros) + 1


# The word-level shuffle is called combinatorially often by the products
# module, so results are memoized forever.  The table only grows with the
# distinct (word, word) pairs seen; insertion is idempotent, hence safe
# under concurrent callers on CPython.
_SHUFFLE_MEMO: dict[tuple[Word, Word], tuple] = {}


def _shuffle_items(nu: Word, xi: Word) -> tuple:
    """Memoized word shuffle as a tuple of (word, multiplicity) pairs."""
    if xi < nu:
        nu, xi = xi, nu
    key = (nu, xi)
    cached = _SHUFFLE_MEMO.get(key)
    if cached is not None:
        return cached
    k, n = len(nu), len(nu) + len(xi)
    counts: dict[Word, int] = {}
    if k == 0:
        counts[xi] = 1
    elif len(xi) == 0:
        counts[nu] = 1
    else:
        # Place the letters of nu on each k-subset of positions, fill the
        # rest with xi; every interleaving arises exactly once per placement.
        out = [0] * n
        for positions in itertools.combinations(range(n), k):
            it_xi = iter(xi)
            pos_set = set(positions)
            for i, p in enumerate(positions):
                out[p] = nu[i]
            for p in range(n):
                if p not in pos_set:
                    out[p] = next(it_xi)
            w = tuple(out)
            counts[w] = counts.get(w, 0) + 1
    items = tuple(sorted(counts.items()))
    _SHUFFLE_MEMO[key] = items
    return items


def shuffle_words(nu: Word, xi: Word) -> dict:
    """Shuffle of two words as a multiset {word: multiplicity}.

    The result is supported on words of length |nu|+|xi| and its total
    multiplicity is binomial(|nu|+|xi|, |nu|).
    """
    return dict(_shuffle_items(nu, xi))


def parse_word(text: str) -> Word:
    """Parse the textual word syntax: 'e' for the empty word, else 'x0x1x1'."""
    if text == "e":
        return EMPTY_WORD
    if not _WORD_RE.fullmatch(text):
        raise SeriesSyntaxError(f"malformed word {text!r} (expected 'e' or tokens like 'x0x1')")
    return tuple(int(text[i]) for i in range(1, len(text), 2))


def format_word(word: Word) -> str:
    if not word:
        return "e"
    return "".join(f"x{letter}" for letter in word)
