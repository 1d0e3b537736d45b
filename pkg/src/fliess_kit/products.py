"""The four bilinear products on truncated series.

shuffle        - interleaving product, componentwise on the output index
compose        - cascade product, built from the x0-prefixing letter map
mixed_compose  - composition against a unital series delta + d
pre_lie        - length-homogeneous product whose antisymmetrization is the
                 Lie bracket of the output-feedback group
lie_bracket    - pre_lie(c, d) - pre_lie(d, c)

All products are structural recursions on words with per-call memo tables
(worker-local, so concurrent callers never share mutable state).  Inputs
must be truncated at least at the requested output truncation L; outputs
are then exact at L because every recursion step is length-nondecreasing.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ComponentMismatch, TruncationMismatch
from .series import Series
from .words import _shuffle_items

_ONE = Fraction(1)


def _require_trunc(L, *series):
    for s in series:
        if s.trunc < L:
            raise TruncationMismatch(
                f"operand truncated at {s.trunc}, below requested output truncation {L}"
            )


def _default_L(L, *series):
    if L is None:
        L = min(s.trunc for s in series)
    _require_trunc(L, *series)
    return L


def _prune(d):
    return {w: v for w, v in d.items() if v}


def _shuffle_dict(a: dict, b: dict, L: int) -> dict:
    out: dict = {}
    get = out.get
    for nu, av in a.items():
        room = L - len(nu)
        if room < 0:
            continue
        for xi, bv in b.items():
            if len(xi) > room:
                continue
            ab = av * bv
            for w, mult in _shuffle_items(nu, xi):
                out[w] = get(w, 0) + ab * mult
                get = out.get
    return _prune(out)


def _prefix(letter: int, d: dict, L: int) -> dict:
    return {(letter,) + w: v for w, v in d.items() if len(w) < L}


def _merge(a: dict, b: dict) -> dict:
    if not b:
        return a
    out = dict(a)
    for w, v in b.items():
        s = out.get(w, 0) + v
        if s:
            out[w] = s
        else:
            del out[w]
    return out


def shuffle(c: Series, d: Series, L=None) -> Series:
    """Shuffle product, extended componentwise for ell > 1."""
    if c.m != d.m or c.ell != d.ell:
        raise ComponentMismatch(
            f"shuffle needs matching shapes, got (m={c.m}, l={c.ell}) and (m={d.m}, l={d.ell})"
        )
    L = _default_L(L, c, d)
    comps = tuple(
        _shuffle_dict(a, b, L) for a, b in zip(c.components, d.components)
    )
    return Series(c.m, L, comps, validate=False)


def shuffle_power(c: Series, n: int, L=None) -> Series:
    """n-fold shuffle power; the 0th power is the unit series 1."""
    L = _default_L(L, c)
    out = Series.one(c.m, L, c.ell)
    for _ in range(n):
        out = shuffle(out, c, L)
    return out


def _check_right_operand(c: Series, d: Series, what: str):
    if d.m != c.m:
        raise ComponentMismatch(f"{what}: alphabet mismatch m={c.m} vs {d.m}")
    if d.ell != c.m:
        raise ComponentMismatch(
            f"{what}: right operand must have m={c.m} components, got {d.ell}"
        )


def _letter_fold(c: Series, d: Series, L: int, mixed: bool) -> Series:
    """Shared driver for compose (mixed=False) and mixed_compose (mixed=True).

    Processes each support word of c right to left, starting from the unit
    monomial and applying the letter map; suffix results are memoized since
    support words share suffixes heavily.
    """
    # letter i >= 1 shuffles in the (i-1)-th component of d; letter 0 uses
    # the unit series for the plain composition and zero for the mixed one.
    d_letter = [dict(comp) for comp in d.components]
    d_letter.insert(0, {} if mixed else {(): _ONE})

    memo: dict = {(): {(): _ONE}}

    def fold(word):
        res = memo.get(word)
        if res is not None:
            return res
        i, rest = word[0], word[1:]
        base = fold(rest)
        if mixed:
            res = _prefix(i, base, L)
            if d_letter[i]:
                res = _merge(res, _prefix(0, _shuffle_dict(d_letter[i], base, L - 1), L))
        else:
            res = _prefix(0, _shuffle_dict(d_letter[i], base, L - 1), L)
        # local finiteness: every letter application prepends one letter,
        # so no result word may be shorter than the processed suffix
        assert all(len(w) >= len(word) for w in res)
        memo[word] = res
        return res

    comps = []
    for comp in c.components:
        out: dict = {}
        for word, cv in comp.items():
            if len(word) > L:
                continue
            for w, v in fold(word).items():
                s = out.get(w, 0) + cv * v
                out[w] = s
        comps.append(_prune(out))
    return Series(c.m, L, tuple(comps), validate=False)


def compose(c: Series, d: Series, L=None) -> Series:
    """Cascade composition product.

    Each letter acts by e -> x0 (d[i] sh e) with d[0] the unit series; the
    x0 prefix makes the product locally finite in word length.
    """
    _check_right_operand(c, d, "compose")
    L = _default_L(L, c, d)
    return _letter_fold(c, d, L, mixed=False)


def mixed_compose(c: Series, d: Series, L=None) -> Series:
    """Composition with the unital series delta + d.

    Each letter acts by e -> x_i e + x0 (d[i] sh e) with d[0] zero; note the
    letter-0 default differs from compose on purpose.
    """
    _check_right_operand(c, d, "mixed_compose")
    L = _default_L(L, c, d)
    return _letter_fold(c, d, L, mixed=True)


def _word_prelie_map(word, d_letter, L: int, memo: dict) -> dict:
    """Word-level pre-Lie action against the per-letter dicts d_letter.

    d_letter[0] must be empty; d_letter[j] is the (j-1)-th component of the
    right operand.  Result words all have length |word| + |support word|.
    """
    res = memo.get(word)
    if res is not None:
        return res
    if not word:
        res = {}
    else:
        j, rest = word[0], word[1:]
        res = _prefix(j, _word_prelie_map(rest, d_letter, L, memo), L)
        if j >= 1 and d_letter[j]:
            sh = _shuffle_dict({rest: _ONE}, d_letter[j], L - 1)
            res = _merge(res, _prefix(0, sh, L))
    memo[word] = res
    return res


def _prelie_letter_dicts(d: Series):
    out = [dict(comp) for comp in d.components]
    out.insert(0, {})
    return out


def pre_lie(c: Series, d: Series, L=None) -> Series:
    """Pre-Lie product; length homogeneous, hence exact at any truncation.

    The empty word acts as zero and letter x0 never consumes a component
    of d, so pure-x0 words annihilate everything.
    """
    _check_right_operand(c, d, "pre_lie")
    L = _default_L(L, c, d)
    d_letter = _prelie_letter_dicts(d)
    memo: dict = {}
    comps = []
    for comp in c.components:
        out: dict = {}
        for word, cv in comp.items():
            if len(word) > L:
                continue
            for w, v in _word_prelie_map(word, d_letter, L, memo).items():
                out[w] = out.get(w, 0) + cv * v
        comps.append(_prune(out))
    return Series(c.m, L, tuple(comps), validate=False)


def lie_bracket(c: Series, d: Series, L=None) -> Series:
    """Antisymmetrized pre-Lie product [c, d] = c <| d - d <| c."""
    if not (c.m == d.m and c.ell == d.ell == c.m):
        raise ComponentMismatch(
            "lie_bracket needs two m-component series over the same alphabet"
        )
    L = _default_L(L, c, d)
    from .series import subtract

    return subtract(pre_lie(c, d, L), pre_lie(d, c, L))
