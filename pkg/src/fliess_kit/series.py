"""Truncated noncommutative formal power series.

A Series maps words over {x0..xm} to coefficient vectors with ell components.
Storage is sparse and canonical: absent word means zero *within* the
truncation length; beyond it a coefficient is unknown and querying raises.
Coefficients within one series share a scalar mode: exact (int/Fraction),
float, or polynomial (used internally to carry symbolic growth constants).

Series values are immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import (
    ComponentMismatch,
    DuplicateWordError,
    QueryBeyondTruncation,
    SeriesSyntaxError,
)
from .words import EMPTY_WORD, format_word, parse_word, validate_word

_FACTORIALS = [math.factorial(n) for n in range(64)]


def factorial(n: int):
    if n < len(_FACTORIALS):
        return _FACTORIALS[n]
    return math.factorial(n)


class Series:
    """Truncation-bounded series c with ell components over {x0..xm}.

    components[j] is a dict word -> scalar for output component j (0-based).
    No stored word exceeds `trunc`, no stored value is zero.
    """

    __slots__ = ("m", "trunc", "components")

    def __init__(self, m, trunc, components, validate=True):
        if validate:
            if m < 0 or trunc < 0 or not components:
                raise ValueError("need m >= 0, trunc >= 0, ell >= 1")
            clean = []
            for comp in components:
                d = {}
                for word, value in comp.items():
                    if len(word) > trunc:
                        raise ValueError(
                            f"stored word {format_word(word)} exceeds truncation {trunc}"
                        )
                    validate_word(word, m)
                    if isinstance(value, int):
                        value = Fraction(value)
                    if value:
                        d[word] = value
                clean.append(d)
            components = tuple(clean)
        self.m = m
        self.trunc = trunc
        self.components = components

    @property
    def ell(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, m=1, trunc=0, ell=1):
        return cls(m, trunc, tuple({} for _ in range(ell)), validate=False)

    @classmethod
    def one(cls, m=1, trunc=0, ell=1):
        return cls(m, trunc, tuple({EMPTY_WORD: Fraction(1)} for _ in range(ell)))

    @classmethod
    def from_terms(cls, terms, m=1, trunc=None, ell=1):
        """Build a single-component (or ell-component) series from coeff maps.

        `terms` is a dict word -> scalar for ell == 1, or a sequence of such
        dicts.  The truncation defaults to the longest stored word.
        """
        comps = [dict(terms)] if isinstance(terms, dict) else [dict(t) for t in terms]
        if len(comps) != ell:
            ell = len(comps)
        if trunc is None:
            trunc = max((len(w) for comp in comps for w in comp), default=0)
        return cls(m, trunc, tuple(comps), validate=True)

    @classmethod
    def word_series(cls, word, coeff=1, m=None, trunc=None):
        if m is None:
            m = max(word, default=0) or 1
        if trunc is None:
            trunc = len(word)
        return cls.from_terms({tuple(word): coeff}, m=m, trunc=trunc)

    def component_dict(self, j):
        """0-based component access used by the product folds."""
        return self.components[j]

    def is_zero(self) -> bool:
        return all(not comp for comp in self.components)

    def support(self):
        """Sorted union of the component supports."""
        words = set()
        for comp in self.components:
            words.update(comp)
        return sorted(words, key=lambda w: (len(w), w))

    def truncated(self, L) -> "Series":
        if L > self.trunc:
            raise QueryBeyondTruncation(
                f"cannot extend truncation {self.trunc} to {L}; coefficients unknown"
            )
        comps = tuple(
            {w: v for w, v in comp.items() if len(w) <= L} for comp in self.components
        )
        return Series(self.m, L, comps, validate=False)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return (
            self.m == other.m
            and len(self.components) == len(other.components)
            and all(a == b for a, b in zip(self.components, other.components))
        )

    def __hash__(self):
        return hash(
            (self.m, tuple(frozenset(comp.items()) for comp in self.components))
        )

    def __repr__(self):
        body = serialize_series(self, header=False).replace("\n", "; ")
        return f"<Series m={self.m} l={self.ell} L={self.trunc}: {body or '0'}>"


def coefficient(c: Series, word) -> tuple:
    """Coefficient vector of c at the given word.

    Raises QueryBeyondTruncation when |word| exceeds the truncation: the
    value there was never computed and is not zero.
    """
    word = tuple(word)
    validate_word(word, c.m)
    if len(word) > c.trunc:
        raise QueryBeyondTruncation(
            f"|{format_word(word)}| = {len(word)} exceeds truncation {c.trunc}"
        )
    return tuple(comp.get(word, 0) for comp in c.components)


def _check_compatible(c: Series, d: Series):
    if c.m != d.m:
        raise ComponentMismatch(f"alphabet mismatch: m={c.m} vs m={d.m}")
    if c.ell != d.ell:
        raise ComponentMismatch(f"component mismatch: l={c.ell} vs l={d.ell}")


def add(c: Series, d: Series) -> Series:
    _check_compatible(c, d)
    trunc = min(c.trunc, d.trunc)
    comps = []
    for a, b in zip(c.components, d.components):
        out = {w: v for w, v in a.items() if len(w) <= trunc}
        for w, v in b.items():
            if len(w) > trunc:
                continue
            s = out.get(w, 0) + v
            if s:
                out[w] = s
            else:
                out.pop(w, None)
        comps.append(out)
    return Series(c.m, trunc, tuple(comps), validate=False)


def negate(c: Series) -> Series:
    comps = tuple({w: -v for w, v in comp.items()} for comp in c.components)
    return Series(c.m, c.trunc, comps, validate=False)


def subtract(c: Series, d: Series) -> Series:
    return add(c, negate(d))


def scale(c: Series, s) -> Series:
    if isinstance(s, int):
        s = Fraction(s)
    if not s:
        return Series.zero(c.m, c.trunc, c.ell)
    comps = tuple({w: s * v for w, v in comp.items()} for comp in c.components)
    return Series(c.m, c.trunc, comps, validate=False)


def extend_truncation(c: Series, trunc: int) -> Series:
    """Declare knowledge of c up to a longer truncation.

    Only valid for polynomial series: the caller asserts every coefficient
    beyond the stored support is genuinely zero, not merely unknown.
    """
    if trunc < c.trunc:
        return c.truncated(trunc)
    return Series(c.m, trunc, c.components, validate=False)


def max_abs_coefficient(c: Series):
    """Largest |coefficient| over the stored support (0 for the zero series)."""
    best = 0
    for comp in c.components:
        for v in comp.values():
            a = abs(v)
            if a > best:
                best = a
    return best


def linf_norm(c: Series, M):
    """Truncated sup of |(c,w)| / (M^|w| |w|!) over the stored support.

    Exact for polynomial series; a lower bound for the untruncated norm
    otherwise.  M must be positive and numeric.
    """
    if M <= 0:
        raise ValueError("norm parameter M must be positive")
    if isinstance(M, int):
        M = Fraction(M)
    best = 0
    for comp in c.components:
        for w, v in comp.items():
            n = len(w)
            ratio = abs(v) / (M**n * factorial(n))
            if ratio > best:
                best = ratio
    return best


def worst_case_series(K, M, L, m=1, ell=1) -> Series:
    """Series with (c, w) = K * M^|w| * |w|! on every word up to length L.

    This is the extremal element of the closed ball of radius K in the
    truncated norm: every ratio in linf_norm equals K.
    """
    if isinstance(K, int):
        K = Fraction(K)
    if isinstance(M, int):
        M = Fraction(M)
    comps = []
    for _ in range(ell):
        d = {}
        for n in range(L + 1):
            value = K * M**n * factorial(n)
            if not value:
                continue
            for w in _all_words(m, n):
                d[w] = value
        comps.append(d)
    return Series(m, L, tuple(comps), validate=False)


def _all_words(m, n):
    import itertools

    return itertools.product(range(m + 1), repeat=n)


def random_ball_series(K, M, L, seed, m=1, ell=1) -> Series:
    """Float series with every coefficient uniform in +-K M^|w| |w|!.

    Deterministic for a fixed seed; by construction linf_norm(., M) <= K.
    """
    rng = np.random.default_rng(seed)
    K, M = float(K), float(M)
    comps = []
    for _ in range(ell):
        d = {}
        for n in range(L + 1):
            bound = K * M**n * factorial(n)
            for w in _all_words(m, n):
                v = float(rng.uniform(-bound, bound))
                if v:
                    d[w] = v
        comps.append(d)
    return Series(m, L, tuple(comps), validate=False)


def random_rational_series(
    L,
    seed,
    m=1,
    ell=1,
    density=0.6,
    max_num=5,
    max_den=4,
    unit_constant=False,
):
    """Sparse random series with small exact rational coefficients.

    Test plumbing: group/shuffle axiom checks want exact arithmetic, so
    coefficients are Fractions with bounded numerator and denominator.
    With unit_constant=True the empty-word coefficient is forced to +-1,
    which keeps shuffle inverses integer-friendly.
    """
    rng = np.random.default_rng(seed)
    comps = []
    for j in range(ell):
        d = {}
        for n in range(L + 1):
            for w in _all_words(m, n):
                if rng.random() >= density:
                    continue
                num = int(rng.integers(-max_num, max_num + 1))
                if num == 0:
                    continue
                den = int(rng.integers(1, max_den + 1))
                d[w] = Fraction(num, den)
        if unit_constant:
            d[EMPTY_WORD] = Fraction(1 if rng.random() < 0.5 else -1)
        comps.append(d)
    return Series(m, L, tuple(comps), validate=False)


# --- text round trip ------------------------------------------------------
#
# Series file format (UTF-8, line oriented):
#   # alphabet m=<int> components l=<int> trunc L=<int>     (optional header)
#   <coeff> <word>                                          (one term per line)
# where <coeff> is an integer, p/q rational or decimal float, and multi
# component series prefix the coefficient with [j], j in 1..ell.
# Lines starting with '#' are ignored apart from the header pattern.

import re as _re

_HEADER_RE = _re.compile(
    r"#\s*alphabet\s+m=(\d+)\s+components\s+l=(\d+)\s+trunc\s+L=(\d+)\s*$"
)
_TERM_RE = _re.compile(
    r"(?:\[(\d+)\])?\s*([^\s\[\]]+)\s+(\S+)\s*$"
)
_RATIONAL_RE = _re.compile(r"[+-]?\d+(/\d+)?$")
_FLOAT_RE = _re.compile(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def _parse_scalar(text, line):
    if _RATIONAL_RE.fullmatch(text):
        return Fraction(text), True
    if _FLOAT_RE.fullmatch(text):
        return float(text), False
    raise SeriesSyntaxError(f"malformed coefficient {text!r}", line)


def parse_series(text: str, m=None, trunc=None, mode=None) -> Series:
    """Parse the line-oriented series format.

    `m`/`trunc` override or stand in for the header; `mode` may force
    'rational' or 'float' coefficients.
    """
    header = None
    terms = []  # (line_no, component, word, value, exact)
    any_float = False
    any_fraction = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hm = _HEADER_RE.match(line)
            if hm and header is None:
                header = tuple(int(g) for g in hm.groups())
            continue
        tm = _TERM_RE.match(line)
        if not tm:
            raise SeriesSyntaxError(f"malformed term line {raw!r}", line_no)
        comp_txt, coeff_txt, word_txt = tm.groups()
        try:
            word = parse_word(word_txt)
        except SeriesSyntaxError as exc:
            raise SeriesSyntaxError(str(exc), line_no) from None
        value, exact = _parse_scalar(coeff_txt, line_no)
        if exact and "/" in coeff_txt:
            any_fraction = True
        if not exact:
            any_float = True
        comp = int(comp_txt) if comp_txt else 1
        if comp < 1:
            raise SeriesSyntaxError(f"component index {comp} out of range", line_no)
        terms.append((line_no, comp, word, value, exact))

    if any_float and any_fraction and mode is None:
        raise SeriesSyntaxError(
            "series mixes p/q rationals and decimal floats; pass an explicit mode"
        )
    if mode is None:
        mode = "float" if any_float else "rational"
    if mode not in ("rational", "float"):
        raise ValueError(f"unknown scalar mode {mode!r}")

    if header is not None:
        hm_m, hm_l, hm_L = header
        m = hm_m if m is None else m
        ell = hm_l
        trunc = hm_L if trunc is None else trunc
    else:
        ell = max((comp for _, comp, _, _, _ in terms), default=1)
    if m is None:
        m = max((max(w, default=0) for _, _, w, _, _ in terms), default=1)
        m = max(m, 1)
    if trunc is None:
        trunc = max((len(w) for _, _, w, _, _ in terms), default=0)

    comps = [dict() for _ in range(ell)]
    for line_no, comp, word, value, _ in terms:
        if comp > ell:
            raise SeriesSyntaxError(
                f"component index {comp} exceeds declared l={ell}", line_no
            )
        if len(word) > trunc:
            raise SeriesSyntaxError(
                f"word {format_word(word)} exceeds truncation L={trunc}", line_no
            )
        if max(word, default=0) > m:
            raise SeriesSyntaxError(
                f"word {format_word(word)} uses letters outside x0..x{m}", line_no
            )
        if word in comps[comp - 1]:
            raise DuplicateWordError(
                f"word {format_word(word)} listed twice for component {comp}", line_no
            )
        if mode == "float":
            value = float(value)
        elif isinstance(value, float):
            value = Fraction(value)
        if value:
            comps[comp - 1][word] = value
    return Series(m, trunc, tuple(comps), validate=False)


def format_scalar(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def serialize_series(c: Series, header=True) -> str:
    """Canonical text form; serialize(parse(.)) is the identity on it."""
    lines = []
    if header:
        lines.append(f"# alphabet m={c.m} components l={c.ell} trunc L={c.trunc}")
    multi = c.ell > 1
    for word in c.support():
        for j, comp in enumerate(c.components, start=1):
            v = comp.get(word)
            if v is None:
                continue
            prefix = f"[{j}]" if multi else ""
            lines.append(f"{prefix}{format_scalar(v)} {format_word(word)}")
    return "\n".join(lines)


class GrowthEstimate:
    """Pair (K, M) witnessing |(c,w)| <= K M^|w| |w|! on a truncated support."""

    __slots__ = ("K", "M")

    def __init__(self, K, M):
        if K < 0 or M <= 0:
            raise ValueError("need K >= 0 and M > 0")
        self.K = K
        self.M = M

    @classmethod
    def fit(cls, c: Series, M):
        """Smallest K making (K, M) valid for c: the truncated norm."""
        return cls(linf_norm(c, M), M)

    def admits(self, c: Series) -> bool:
        return linf_norm(c, self.M) <= self.K

    def __repr__(self):
        return f"GrowthEstimate(K={self.K}, M={self.M})"
