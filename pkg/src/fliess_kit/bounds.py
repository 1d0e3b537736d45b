"""Explicit growth constants and bound-verification experiments.

Truncated norms stand in for the true sups everywhere, so every check is a
"no counterexample below L" statement; the sup constants K_eps are taken
over the same truncated length range as the norms they bound to avoid
spurious failures from asymmetric truncation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import OracleMismatch, PreconditionUnsatisfiable
from .groups import UnitalSeries, inverse_x0_profile
from .poly import Polynomial, variables
from .products import compose, shuffle
from .series import (
    Series,
    add,
    factorial,
    linf_norm,
    random_ball_series,
    random_rational_series,
    scale,
    subtract,
    worst_case_series,
)

# Majorant integer sequence for the inverse-coefficient polynomials on
# 0 <= K <= 1 (OEIS A112487).
A112487 = (1, 2, 10, 82, 938, 13778, 247210, 5240338)

# Reference coefficient table (ascending powers of K) for the polynomials
# b_k extracted from the pure-x0 inverse coefficients of the worst-case
# series; reproduced by two independent computations in bk_table().
BK_REFERENCE_COEFFS = (
    (-1,),
    (-1, 1),
    (-2, 5, -3),
    (-6, 26, -35, 15),
    (-24, 154, -340, 315, -105),
    (-120, 1044, -3304, 4900, -3465, 945),
    (-720, 8028, -33740, 70532, -78750, 45045, -10395),
    (-5040, 69264, -367884, 1008980, -1571570, 1406790, -675675, 135135),
)


def k_epsilon(eps) -> tuple:
    """(K_eps, Khat_eps): the integer sup of (n+1)/(1+eps)^n and its bound.

    The sup is found by brute force over n = 0 .. ceil(1/log(1+eps)) + 2,
    a range containing the continuous maximizer; the closed-form upper
    bound is e^-1 (1+eps)/log(1+eps).  For eps > e-1 the sup is exactly 1
    while the bound stays above 1.
    """
    if eps <= 0:
        raise ValueError("need eps > 0")
    eps = float(eps)
    n_star = math.ceil(1.0 / math.log1p(eps))
    k_eps = max((n + 1) / (1.0 + eps) ** n for n in range(n_star + 3))
    k_hat = math.exp(-1.0) * (1.0 + eps) / math.log1p(eps)
    return k_eps, k_hat


def k_epsilon_truncated(eps, L: int):
    """sup over lengths n <= L only; exact when eps is rational."""
    if isinstance(eps, float):
        eps = Fraction(eps)
    one = Fraction(1)
    return max((one * (n + 1)) / (1 + eps) ** n for n in range(L + 1))


def k_epsilon_shifted(eps, a, L=None) -> float:
    """sup of (n+1)(1+a)^n/(1+eps)^n, over n <= L or over all n (needs a < eps)."""
    eps, a = float(eps), float(a)
    if L is None:
        if a >= eps:
            raise PreconditionUnsatisfiable(
                f"shifted sup diverges: a={a} >= eps={eps}"
            )
        ratio = (1.0 + eps) / (1.0 + a)
        n_top = math.ceil(1.0 / math.log(ratio)) + 2
    else:
        n_top = L
    return max((n + 1) * (1.0 + a) ** n / (1.0 + eps) ** n for n in range(n_top + 1))


def phi(x):
    """x/2 + sqrt(x^2/4 + x); nonnegative and strictly increasing on x >= 0."""
    if x < 0:
        raise ValueError("need x >= 0")
    x = float(x)
    return x / 2.0 + math.sqrt(x * x / 4.0 + x)


def phi_inverse(y) -> float:
    """Inverse of phi on y >= 0: y^2/(1+y)."""
    y = float(y)
    return y * y / (1.0 + y)


@dataclass
class BoundReport:
    """Outcome of one verification experiment.

    pass holds iff the max observed lhs/rhs ratio is <= 1 + tolerance.
    """

    lemma: str
    samples: int
    max_ratio: float
    witness: str | None
    passed: bool
    tolerance: float
    lines: list = field(default_factory=list)

    def summary(self) -> str:
        return (
            f"lemma={self.lemma} samples={self.samples} "
            f"max_ratio={format(float(self.max_ratio), '.17g')} pass={self.passed}"
        )

    def render(self) -> str:
        return "\n".join([*(f"# {ln}" for ln in self.lines), self.summary()])


def _map_samples(fn, count, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, range(count)))
    return [fn(i) for i in range(count)]


def verify_shuffle_bound(
    M=1, eps=0.5, L=5, samples=200, seed=7, tolerance=1e-12, threads=1
) -> BoundReport:
    """Check |c sh d| <= K_eps |c| |d| in the (1+eps)-inflated norm.

    Random pairs are drawn from norm balls; the extremal pair with every
    coefficient at K M^n n! is appended as the equality witness and is
    evaluated in exact rational arithmetic, where its ratio is exactly 1.
    """
    Mf = float(M)
    keps = float(k_epsilon_truncated(eps, L))

    def one_sample(i):
        rng_k = __import__("numpy").random.default_rng([seed, i, 99])
        kc = float(rng_k.uniform(0.2, 2.0))
        kd = float(rng_k.uniform(0.2, 2.0))
        c = random_ball_series(kc, Mf, L, seed=[seed, i, 0])
        d = random_ball_series(kd, Mf, L, seed=[seed, i, 1])
        nc, nd = linf_norm(c, Mf), linf_norm(d, Mf)
        if nc == 0 or nd == 0:
            return 0.0
        lhs = linf_norm(shuffle(c, d, L), Mf * (1.0 + float(eps)))
        return lhs / (keps * nc * nd)

    ratios = _map_samples(one_sample, samples, threads)

    M_exact = Fraction(M)
    eps_exact = Fraction(eps)
    cbar = worst_case_series(1, M_exact, L)
    lhs_exact = linf_norm(shuffle(cbar, cbar, L), M_exact * (1 + eps_exact))
    rhs_exact = k_epsilon_truncated(eps_exact, L) * linf_norm(cbar, M_exact) ** 2
    witness_ratio = lhs_exact / rhs_exact

    max_ratio = max([*ratios, float(witness_ratio)])
    lines = [
        f"K_eps(truncated to L={L}) = {format(keps, '.17g')}",
        f"worst-case pair ratio (exact) = {witness_ratio}",
    ]
    return BoundReport(
        lemma="shuffle-bound",
        samples=samples + 1,
        max_ratio=max_ratio,
        witness="worst-case pair" if witness_ratio >= max_ratio else None,
        passed=max_ratio <= 1 + tolerance and witness_ratio == 1,
        tolerance=tolerance,
        lines=lines,
    )


def verify_composition_bound(
    M=1, eps=1.0, L=4, samples=100, seed=11, tolerance=1e-12, threads=1
) -> BoundReport:
    """Check |c o d| <= |c| K_eps(phi(m |d|)) in the inflated norm.

    Each sampled d is rescaled so that eps > phi(m |d|), the lemma's
    precondition; the rescale fails only for eps <= 0.
    """
    if float(eps) <= 0:
        raise PreconditionUnsatisfiable("composition bound needs eps > 0")
    Mf = float(M)
    target = 0.8 * phi_inverse(eps)  # keep phi(m |d|) well below eps

    def one_sample(i):
        rng_k = __import__("numpy").random.default_rng([seed, i, 99])
        kc = float(rng_k.uniform(0.2, 2.0))
        kd = float(rng_k.uniform(0.2, 2.0))
        c = random_ball_series(kc, Mf, L, seed=[seed, i, 0])
        d = random_ball_series(kd, Mf, L, seed=[seed, i, 1])
        m = c.m
        nd = linf_norm(d, Mf)
        if nd and m * nd > target:
            d = scale(d, target / (m * nd))
            nd = linf_norm(d, Mf)
        a = phi(m * nd)
        if a >= eps:
            raise PreconditionUnsatisfiable(
                f"could not rescale sample {i} below eps"
            )
        nc = linf_norm(c, Mf)
        if nc == 0:
            return 0.0
        lhs = linf_norm(compose(c, d, L), Mf * (1.0 + float(eps)))
        rhs = nc * k_epsilon_shifted(eps, a, L)
        return lhs / rhs if rhs else 0.0

    ratios = _map_samples(one_sample, samples, threads)
    max_ratio = max(ratios) if ratios else 0.0
    return BoundReport(
        lemma="composition-bound",
        samples=samples,
        max_ratio=max_ratio,
        witness=None,
        passed=max_ratio <= 1 + tolerance,
        tolerance=tolerance,
        lines=[f"rescale target m*|d| = {format(target, '.17g')}"],
    )


def binomial_scan(n_max=12, len_max=12) -> tuple:
    """Exhaustive max of binom(n-1+l, n-1)/4^l over 1 <= n <= l (the
    constant in the shuffle-power majorant).  Returns (value, (n, l))."""
    best, arg = Fraction(0), None
    for n in range(1, n_max + 1):
        for l in range(n, len_max + 1):
            v = Fraction(comb(n - 1 + l, n - 1), 4**l)
            if v > best:
                best, arg = v, (n, l)
    return best, arg


# -- symmetric-series profiles ------------------------------------------------
#
# A series whose coefficient depends only on word length is determined by
# its length profile f[n]; the shuffle of two such series is again one,
# with profile h[s] = sum_k f[k] g[s-k] binom(s, k).  The explicit majorant
# series of the shuffle-power lemma has this shape, which turns its power
# norms into exact one-dimensional convolutions.  (The profile arithmetic
# is validated against the generic shuffle in the test suite.)


def profile_shuffle(f: list, g: list, L: int) -> list:
    out = [Fraction(0)] * (L + 1)
    for s in range(L + 1):
        acc = Fraction(0)
        for k in range(s + 1):
            if k < len(f) and s - k < len(g):
                fv, gv = f[k], g[s - k]
                if fv and gv:
                    acc += fv * gv * comb(s, k)
        out[s] = acc
    return out


def profile_norm(f: list, N) -> Fraction:
    N = Fraction(N)
    return max(abs(v) / (N**n * factorial(n)) for n, v in enumerate(f))


def verify_shuffle_power_majorant(
    N=1, L=8, n_max=8, scan_n=12, scan_len=12
) -> BoundReport:
    """Check |d^{sh n}|_{4N} <= K / 2^n for the lemma's explicit majorant d.

    d carries S N^|w| |w|! on every nonempty word with S = 1/2 (the value
    the norm rescale guarantees); K comes from the exhaustive binomial
    scan.  All arithmetic is exact.
    """
    K, arg = binomial_scan(scan_n, scan_len)
    S = Fraction(1, 2)
    N = Fraction(N)
    d_prof = [Fraction(0)] + [S * N**n * factorial(n) for n in range(1, L + 1)]
    power = [Fraction(1)] + [Fraction(0)] * L  # unit profile
    max_ratio = Fraction(0)
    lines = [f"binomial scan K = {K} at (n, |w|) = {arg}"]
    for n in range(1, n_max + 1):
        power = profile_shuffle(power, d_prof, L)
        norm = profile_norm(power, 4 * N)
        bound = K / 2**n
        ratio = norm / bound
        lines.append(f"n={n}: |d^sh{n}|_(4N) = {norm} <= {bound}: ratio {float(ratio):.6f}")
        if ratio > max_ratio:
            max_ratio = ratio
    return BoundReport(
        lemma="shuffle-power-majorant",
        samples=n_max,
        max_ratio=float(max_ratio),
        witness=None,
        passed=max_ratio <= 1,
        tolerance=0.0,
        lines=lines,
    )


def verify_shuffle_power_sum(
    M=1, L=6, j_values=(1, 2, 4, 8), seed=23, n_search=16
) -> BoundReport:
    """Convergence of sum_n |c^{sh n} - c_j^{sh n}| as c_j -> c.

    Proper rational series are rescaled so the combined norm is at most
    1/2, an integer N >= M achieving it is searched for, and the partial
    sums at 4N are checked to decrease along the sequence c_j = c + p/j.
    Includes the exact majorant sub-check.
    """
    M = Fraction(M)
    c = random_rational_series(L, seed=[seed, 0], density=0.7)
    p = random_rational_series(L, seed=[seed, 1], density=0.7)
    c = _make_proper(c)
    p = _make_proper(p)
    nc, np_ = linf_norm(c, M), linf_norm(p, M)
    if nc:
        c = scale(c, Fraction(1, 6) / nc)
    if np_:
        p = scale(p, Fraction(1, 6) / np_)

    cj = {j: add(c, scale(p, Fraction(1, j))) for j in j_values}
    N = None
    for cand in range(int(M), int(M) + n_search + 1):
        if cand < M or cand == 0:
            continue
        total = linf_norm(c, cand) + max(linf_norm(s, cand) for s in cj.values())
        if total <= Fraction(1, 2):
            N = cand
            break
    if N is None:
        raise PreconditionUnsatisfiable("no integer N achieved the 1/2 norm budget")

    sums = []
    for j in j_values:
        power_c = Series.one(c.m, L)
        power_j = Series.one(c.m, L)
        total = Fraction(0)
        for _ in range(1, L + 1):
            power_c = shuffle(power_c, c, L)
            power_j = shuffle(power_j, cj[j], L)
            total += linf_norm(subtract(power_c, power_j), 4 * N)
        sums.append((j, total))

    decreasing = all(b[1] <= a[1] for a, b in zip(sums, sums[1:]))
    max_ratio = 0.0
    for a, b in zip(sums, sums[1:]):
        if a[1]:
            max_ratio = max(max_ratio, float(b[1] / a[1]))
    lines = [f"N = {N}"] + [f"j={j}: partial sum = {float(s):.6e}" for j, s in sums]
    majorant = verify_shuffle_power_majorant(N=N, L=min(L + 2, 8))
    lines.extend(majorant.lines)
    return BoundReport(
        lemma="shuffle-power-sum",
        samples=len(j_values),
        max_ratio=max_ratio,
        witness=None,
        passed=decreasing and majorant.passed,
        tolerance=0.0,
        lines=lines,
    )


def _make_proper(c: Series) -> Series:
    comps = tuple(
        {w: v for w, v in comp.items() if w} for comp in c.components
    )
    return Series(c.m, c.trunc, comps, validate=False)


# -- the b_k table ------------------------------------------------------------


@dataclass
class BkTable:
    """Inverse-coefficient polynomials along pure-x0 words.

    rows[k] lists the coefficients of b_k (ascending powers of K), where
    the pure-x0 inverse coefficient factors as b_k(K) * K * M^k.  The
    factorial-free normalization is what both internal computations
    produce; a k! factor on top of it is ruled out by either one.
    """

    k_max: int
    rows: list
    inverse_coeffs: list  # Polynomial values of (inverse, x0^k)
    normalization: str = "(inverse, x0^k) = b_k(K) * K * M^k (no k! factor)"

    def header(self) -> str:
        return f"# normalization: {self.normalization}"

    def render(self) -> str:
        lines = [self.header()]
        for k, coeffs in enumerate(self.rows):
            poly = Polynomial(
                ("K",), {(i,): c for i, c in enumerate(coeffs)}
            )
            lines.append(f"b_{k}(K) = {poly}")
        return "\n".join(lines)


BK_TABLE_LIMIT = 10


def bk_table(k_max=7) -> BkTable:
    """Compute the b_k polynomials two independent ways and reconcile them.

    Route one: iterated Lie derivatives of y = -z along the drift
    z' = (M/K)(z^2 - z^3), z(0) = K, with symbolic K and M.  Route two:
    the degreewise group inverse of the extremal series with coefficients
    K M^n n!, restricted to pure-x0 words.  OracleMismatch is raised when
    the two disagree; otherwise the common value is normalized by K M^k.
    """
    if not 0 <= k_max <= BK_TABLE_LIMIT:
        raise ValueError(f"k_max must lie in 0..{BK_TABLE_LIMIT}")
    z, K, M = variables("z K M")
    g0 = (M / K) * (z**2 - z**3)
    lie_vals = []
    p = -z
    for _ in range(k_max + 1):
        lie_vals.append(p.subs({"z": K}))
        p = g0 * p.diff("z")

    cbar = worst_case_series(K, M, k_max)
    inv_vals = inverse_x0_profile(UnitalSeries(cbar), k_max)

    for k, (a, b) in enumerate(zip(lie_vals, inv_vals)):
        if a != b:
            raise OracleMismatch(
                f"Lie-derivative and group-inverse values differ at x0^{k}: {a} vs {b}"
            )

    rows = []
    for k, v in enumerate(inv_vals):
        bk = v * Polynomial.monomial({"K": -1, "M": -k})
        rows.append(bk.univariate_coeffs("K"))
    return BkTable(k_max=k_max, rows=rows, inverse_coeffs=list(inv_vals))


def verify_bk_majorant(k_max=7, grid=None) -> BoundReport:
    """Check |b_k(K)| <= A112487[k] on a rational grid in [0, 1], exactly.

    The printed polynomials are negative near K = 0, so the comparison
    uses absolute values.
    """
    if k_max >= len(A112487):
        raise ValueError(f"majorant values available only for k <= {len(A112487) - 1}")
    if grid is None:
        grid = [Fraction(i, 10) for i in range(11)]
    table = bk_table(k_max)
    max_ratio = Fraction(0)
    lines = []
    for k, coeffs in enumerate(table.rows):
        bound = A112487[k]
        worst = Fraction(0)
        for Kv in grid:
            val = sum(c * Kv**i for i, c in enumerate(coeffs))
            worst = max(worst, abs(val))
        lines.append(f"k={k}: max |b_k| on grid = {worst} <= {bound}")
        max_ratio = max(max_ratio, Fraction(worst, 1) / bound)
    return BoundReport(
        lemma="bk-majorant",
        samples=len(grid) * (k_max + 1),
        max_ratio=float(max_ratio),
        witness=None,
        passed=max_ratio <= 1,
        tolerance=0.0,
        lines=lines,
    )
