"""The two group structures on truncated series.

* the shuffle unit group: non-proper series under the shuffle product, with
  the geometric-series inverse and the quotient;
* the output-feedback group: unital series delta + c under composition, with
  the degreewise inverse and the feedback product built from it.
"""

from __future__ import annotations

from math import comb

from .errors import (
    ComponentMismatch,
    NonConvergence,
    ProperSeriesError,
    TruncationMismatch,
    UnsupportedArity,
)
from .products import _default_L, _merge, _shuffle_dict, mixed_compose, compose, shuffle
from .series import Series, add, negate


class UnitalSeries:
    """The generating series delta + body of a unital operator I + F_body.

    delta itself is fictitious and never stored; the body must have m
    components over the (m+1)-letter alphabet so the group product is
    defined.
    """

    __slots__ = ("body",)

    def __init__(self, body: Series):
        if body.ell != body.m:
            raise ComponentMismatch(
                f"unital series needs m={body.m} components, got {body.ell}"
            )
        self.body = body

    @classmethod
    def identity(cls, m=1, trunc=0):
        return cls(Series.zero(m, trunc, m))

    @property
    def m(self):
        return self.body.m

    @property
    def trunc(self):
        return self.body.trunc

    def __eq__(self, other):
        if not isinstance(other, UnitalSeries):
            return NotImplemented
        return self.body == other.body

    def __hash__(self):
        return hash(("delta+", self.body))

    def __repr__(self):
        return f"<UnitalSeries delta + {self.body!r}>"


def shuffle_inverse(c: Series, L=None) -> Series:
    """Inverse in the shuffle algebra, componentwise.

    Writes c = a0 (1 - c') with c' proper and expands the geometric star
    sum; the sum terminates at the truncation length because c' is proper.
    Requires a nonzero empty-word coefficient in every component.
    """
    L = _default_L(L, c)
    comps = []
    for comp in c.components:
        a0 = comp.get((), 0)
        if not a0:
            raise ProperSeriesError(
                "shuffle inverse needs a non-proper series (nonzero coefficient at e)"
            )
        cp = {w: -v / a0 for w, v in comp.items() if w and len(w) <= L}
        acc = {(): 1}
        p = {(): 1}
        for _ in range(L):
            p = _shuffle_dict(p, cp, L)
            if not p:
                break
            acc = _merge(acc, p)
        comps.append({w: v / a0 for w, v in acc.items()})
    return Series(c.m, L, tuple(comps), validate=False)


def shuffle_quotient(c: Series, d: Series, L=None) -> Series:
    """Quotient c / d := c sh d^{sh -1}; d must be non-proper."""
    L = _default_L(L, c, d)
    return shuffle(c, shuffle_inverse(d, L), L)


def group_product(a: UnitalSeries, b: UnitalSeries, L=None) -> UnitalSeries:
    """Composition of unital series: body = b + (a mixed-composed with b)."""
    L = _default_L(L, a.body, b.body)
    return UnitalSeries(add(b.body, mixed_compose(a.body, b.body, L)))


def group_inverse(c_delta: UnitalSeries, N=None) -> UnitalSeries:
    """Two-sided inverse in the output-feedback group, exact at truncation N.

    Solves e = -(c composed-with e_delta) coefficientwise.  Every use of a
    coefficient of e inside the right-hand side is prefixed by x0 and padded
    with at least the consumed letter, so the word-length level of e being
    assigned depends only on strictly shorter (equivalently, strictly lower
    degree) levels; one sweep per length level therefore fixes everything.
    The defining property is re-checked at the end and NonConvergence is
    raised on any residual, which would indicate an implementation bug.
    """
    c = c_delta.body
    N = _default_L(N, c)
    e_comps = [dict() for _ in range(c.ell)]
    for level in range(N + 1):
        partial = Series(c.m, N, tuple(e_comps), validate=False)
        t = mixed_compose(c, partial, level)
        for j, comp in enumerate(t.components):
            for w, v in comp.items():
                if len(w) == level and v:
                    e_comps[j][w] = -v
    inv = UnitalSeries(Series(c.m, N, tuple(dict(d) for d in e_comps), validate=False))
    residual = group_product(c_delta, inv, N)
    if not residual.body.is_zero():
        raise NonConvergence(
            "degreewise inverse sweep left a nonzero residual; this is a bug"
        )
    return inv


def inverse_x0_profile(c_delta: UnitalSeries, kmax: int) -> list:
    """Coefficients of the group inverse along the pure-x0 words.

    Returns [(c_delta^{o-1}, x0^k) for k = 0..kmax] without materializing
    the whole inverse: a coefficient at x0^k only ever reads inverse
    coefficients at shorter pure-x0 words, since landing on an all-x0
    output word forces every shuffled-in support word to be all-x0 as well.
    Single-input single-output only; coefficients may be symbolic.
    """
    c = c_delta.body
    if c.m != 1 or c.ell != 1:
        raise UnsupportedArity("pure-x0 inverse profile is defined for m = l = 1")
    if c.trunc < kmax:
        raise TruncationMismatch(
            f"series truncated at {c.trunc}, need at least {kmax}"
        )
    comp = c.components[0]
    phi: list = []  # phi[j] = coefficient of the inverse at x0^j
    memo: dict = {}

    def image_coeff(word, t):
        # coefficient of x0^t in the letter-fold image of `word`
        if t < len(word):
            return 0
        key = (word, t)
        res = memo.get(key)
        if res is not None:
            return res
        if not word:
            res = 1 if t == 0 else 0
        else:
            j, rest = word[0], word[1:]
            if j == 0:
                res = image_coeff(rest, t - 1)
            else:
                res = 0
                for i in range(min(len(phi), t)):
                    ph = phi[i]
                    if not ph:
                        continue
                    sub = image_coeff(rest, t - 1 - i)
                    if sub:
                        res = res + comb(t - 1, i) * ph * sub
        memo[key] = res
        return res

    for k in range(kmax + 1):
        total = 0
        for word, cv in comp.items():
            if len(word) <= k:
                a = image_coeff(word, k)
                if a:
                    total = total + cv * a
        phi.append(-total)
    return phi


def feedback(c: Series, d: Series, L=None) -> Series:
    """Closed-loop generating series with F_c forward and F_d in feedback.

    Computed exactly as c composed against the group inverse of the unital
    series delta - d o c.  Restricted to the single-input single-output
    case; other arities raise UnsupportedArity.
    """
    if not (c.m == 1 and c.ell == 1 and d.m == 1 and d.ell == 1):
        raise UnsupportedArity("feedback product is restricted to m = l = 1")
    L = _default_L(L, c, d)
    loop = negate(compose(d, c, L))
    inv = group_inverse(UnitalSeries(loop), L)
    return mixed_compose(c, inv.body, L)
