"""Named verification suites: every desk-checkable claim as a pass/fail item.

The CLI `suite` verb runs these; the acceptance tests assert them one by
one.  Each check returns a CheckResult with a deterministic detail string.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bounds as bounds_mod
from .errors import FliessKitError
from .evolution import (
    LieAlgebraCurve,
    evolve,
    one_parameter_check,
    scale_series,
    shuffle_volterra,
    volterra_path,
)
from .fliess import (
    InputSignal,
    IteratedIntegrals,
    PolynomialRealization,
    cascade_check,
    feedback_loop_simulate,
    fliess_eval,
    realization_to_series,
)
from .groups import UnitalSeries, group_inverse, group_product, shuffle_inverse, shuffle_quotient
from .poly import Polynomial, variables
from .products import compose, mixed_compose, pre_lie, shuffle
from .series import (
    Series,
    add,
    extend_truncation,
    linf_norm,
    max_abs_coefficient,
    random_rational_series,
    scale,
    subtract,
    worst_case_series,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag} {self.name}" + (f" ({self.detail})" if self.detail else "")


def _bounded_random_series(L, seed, density=0.7, trunc=None):
    """Random rational polynomial rescaled so every coefficient is at most 1.

    trunc widens the declared truncation: the support stays below L and the
    remaining coefficients are genuinely zero.
    """
    c = random_rational_series(L, seed=seed, density=density)
    top = max_abs_coefficient(c)
    if top > 1:
        c = scale(c, Fraction(1, math.ceil(top)))
    if trunc is not None:
        c = extend_truncation(c, trunc)
    return c


# -- output-feedback group ----------------------------------------------------


def check_group_axioms(triples=25, N=6, seed=2024) -> list[CheckResult]:
    t_start = time.monotonic()
    assoc = ident = inverse = True
    for i in range(triples):
        a, b, c = (
            UnitalSeries(random_rational_series(N, seed=[seed, i, k], density=0.55))
            for k in range(3)
        )
        left = group_product(group_product(a, b, N), c, N)
        right = group_product(a, group_product(b, c, N), N)
        assoc &= left == right
        e = UnitalSeries.identity(1, N)
        ident &= group_product(a, e, N) == a and group_product(e, a, N) == a
        inv = group_inverse(a, N)
        inverse &= (
            group_product(a, inv, N).body.is_zero()
            and group_product(inv, a, N).body.is_zero()
        )
    elapsed = time.monotonic() - t_start
    return [
        CheckResult(f"group associativity, {triples} random triples at N={N}", assoc),
        CheckResult("group identity, both sides", ident),
        CheckResult("group inverse, two-sided round trip to delta", inverse),
        CheckResult(
            f"group-axioms runtime < 60 s", elapsed < 60, f"{elapsed:.1f}s"
        ),
    ]


def check_inverse_antimorphism(N=6, seed=77) -> CheckResult:
    a = UnitalSeries(random_rational_series(N, seed=[seed, 0], density=0.5))
    b = UnitalSeries(random_rational_series(N, seed=[seed, 1], density=0.5))
    lhs = group_inverse(group_product(a, b, N), N)
    rhs = group_product(group_inverse(b, N), group_inverse(a, N), N)
    return CheckResult(f"inversion antimorphism at N={N}", lhs == rhs)


# -- shuffle group -------------------------------------------------------------


def check_shuffle_group(count=25, L=8, seed=501) -> list[CheckResult]:
    ok_inv = ok_quot = True
    one = Series.one(1, L)
    for i in range(count):
        c = random_rational_series(
            L, seed=[seed, i], density=0.4, unit_constant=True
        )
        inv = shuffle_inverse(c, L)
        ok_inv &= shuffle(c, inv, L) == one
        ok_quot &= shuffle_quotient(c, c, L) == one
    return [
        CheckResult(f"shuffle inverse round trip, {count} series at L={L}", ok_inv),
        CheckResult("shuffle quotient c/c = 1", ok_quot),
    ]


# -- bounds -------------------------------------------------------------------


def check_bk_table() -> list[CheckResult]:
    t0 = time.monotonic()
    try:
        table = bounds_mod.bk_table(7)
    except FliessKitError as exc:
        return [CheckResult("b_k table oracles agree", False, str(exc))]
    elapsed = time.monotonic() - t0
    match = all(
        [int(x) for x in row] == list(ref)
        for row, ref in zip(table.rows, bounds_mod.BK_REFERENCE_COEFFS)
    )
    return [
        CheckResult("b_k oracles (Lie derivative vs group inverse) agree", True),
        CheckResult("b_k table matches the reference polynomials, k <= 7", match),
        CheckResult("b_k normalization header present", bool(table.header())),
        CheckResult("b_k runtime < 30 s", elapsed < 30, f"{elapsed:.2f}s"),
    ]


def check_bk_majorant() -> CheckResult:
    rep = bounds_mod.verify_bk_majorant(7)
    return CheckResult("|b_k(K)| <= A112487 majorant on the [0,1] grid", rep.passed, rep.summary())


def check_shuffle_bound(seed=7) -> list[CheckResult]:
    rep = bounds_mod.verify_shuffle_bound(M=1, eps=0.5, L=5, samples=200, seed=seed)
    eq_line = next((ln for ln in rep.lines if "worst-case" in ln), "")
    return [
        CheckResult("shuffle bound, 200 seeded pairs at M=1 eps=0.5 L=5", rep.passed, rep.summary()),
        CheckResult("shuffle bound equality case ratio = 1 exactly", "= 1" in eq_line or eq_line.endswith("1"), eq_line),
    ]


def check_composition_bound(seed=11) -> list[CheckResult]:
    rep = bounds_mod.verify_composition_bound(M=1, eps=1.0, L=4, samples=100, seed=seed)
    phi3 = bounds_mod.phi(3)
    return [
        CheckResult("composition bound, 100 pairs under the eps precondition", rep.passed, rep.summary()),
        CheckResult(
            "phi(3) spot value to 1e-10",
            abs(phi3 - 3.79128784747792) <= 1e-10,
            format(phi3, ".17g"),
        ),
    ]


def check_shuffle_power_majorant() -> CheckResult:
    rep = bounds_mod.verify_shuffle_power_majorant(N=1, L=8, n_max=8)
    return CheckResult(
        "shuffle-power majorant |d^sh n| <= K/2^n for n <= 8", rep.passed, rep.summary()
    )


# -- numeric interconnections ---------------------------------------------------


def _smooth_input(T, n=2049):
    return InputSignal.from_function(
        lambda t: [0.8 * math.cos(7 * t) + 0.2 * math.sin(3 * t)], 0.0, T, n, 1
    )


def check_interconnection_numerics(seed=31) -> list[CheckResult]:
    T = 0.05
    u = _smooth_input(T)
    c = _bounded_random_series(3, seed=[seed, 0], trunc=8)
    d = _bounded_random_series(3, seed=[seed, 1], trunc=8)
    cache = IteratedIntegrals(u)
    t = T

    fc = fliess_eval(c, u, t, cache).value[0]
    fd = fliess_eval(d, u, t, cache).value[0]
    fprod = fliess_eval(shuffle(c, d, 3), u, t, cache).value[0]
    product_err = abs(fc * fd - fprod)

    casc = cascade_check(c, d, u, t, L=8)

    from .groups import feedback

    closed = feedback(c, d, 8)
    y_loop, increments = feedback_loop_simulate(c, d, u, iterations=12)
    y_alg = fliess_eval(closed, u, t).value[0]
    fb_err = abs(y_loop.values[-1, 0] - y_alg)

    cache_fine = IteratedIntegrals(_smooth_input(T, 4097))
    errs = []
    for pts in (257, 513, 1025):
        uu = _smooth_input(T, pts)
        e4 = abs(IteratedIntegrals(uu).value((0, 0, 0), T) - T**3 / 6)
        errs.append(e4)
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    order_ok = all(3.0 <= r <= 5.0 for r in ratios)

    return [
        CheckResult("product identity |F_c F_d - F_(c sh d)| <= 1e-6", product_err <= 1e-6, f"{product_err:.2e}"),
        CheckResult("cascade residual <= 1e-4", casc <= 1e-4, f"{casc:.2e}"),
        CheckResult("feedback Picard vs algebraic feedback <= 1e-3", fb_err <= 1e-3, f"{fb_err:.2e}"),
        CheckResult("Picard increments contracted", increments[-1] < increments[0], f"{increments[0]:.1e}->{increments[-1]:.1e}"),
        CheckResult("trapezoid error quarters per step halving", order_ok, ", ".join(f"{r:.2f}" for r in ratios)),
    ]


def check_realizations() -> list[CheckResult]:
    z, = variables("z")
    zero, one = Polynomial.constant(0, ("z",)), Polynomial.constant(1, ("z",))
    integrator = PolynomialRealization(("z",), [[zero], [one]], [z], [Fraction(0)])
    s1 = realization_to_series(integrator, 4)
    want1 = Series.from_terms({(1,): Fraction(1)}, m=1, trunc=4)
    bilinear = PolynomialRealization(("z",), [[zero], [z]], [z], [Fraction(1)])
    s2 = realization_to_series(bilinear, 6)
    want2 = Series.from_terms(
        {(1,) * k: Fraction(1) for k in range(7)}, m=1, trunc=6
    )

    zz, K, M = variables("z K M")
    g0 = (M / K) * (zz**2 - zz**3)
    g1 = zz**2
    inv_real = PolynomialRealization(("z",), [[g0], [g1]], [-zz], [K])
    s3 = realization_to_series(inv_real, 7)
    table = bounds_mod.bk_table(7)
    sym_ok = all(
        s3.components[0].get((0,) * k, Polynomial.constant(0)) == table.inverse_coeffs[k]
        for k in range(8)
    )
    return [
        CheckResult("integrator realization converts to exactly x1", s1 == want1),
        CheckResult("bilinear realization converts to sum of x1^k, L=6", s2 == want2),
        CheckResult("inverse realization reproduces the b_k coefficients symbolically", sym_ok),
    ]


# -- evolution ----------------------------------------------------------------


def check_evolution(seed=91) -> list[CheckResult]:
    x1 = Series.word_series((1,), m=1, trunc=6)

    path = evolve(LieAlgebraCurve.constant_curve(x1), 5, 64, track_access=True)
    reads = path.metadata.get("max_read_level", {})
    triangular = all(read <= lvl for lvl, read in reads.items())

    curve = LieAlgebraCurve(
        lambda t: Series.from_terms(
            {(1,): 1.0 + t, (1, 1): t * t, (0, 1): 1.0}, m=1, trunc=3
        ),
        m=1,
        trunc=3,
    )
    steps = 32
    path2 = evolve(curve, 3, steps)
    h = 1.0 / steps
    quad = 0.0
    worst = 0.0
    for word in ((1,), (1, 1)):
        acc = 0.0
        for k in range(steps):
            f0 = float(curve(k * h).components[0].get(word, 0))
            f1 = float(curve((k + 1) * h).components[0].get(word, 0))
            acc += (h / 2) * (f0 + f1)
        got = float(path2.values[word][-1, 0])
        worst = max(worst, abs(got - acc))
    start_ode_ok = worst <= 1e-12

    r256 = one_parameter_check(x1, 4, 256)
    hand = abs(float(path.values[(0, 1)][-1, 0]) - 0.5)

    c_rand = random_rational_series(5, seed=[seed, 4], density=0.9, unit_constant=True)
    resid = [one_parameter_check(c_rand, 5, s) for s in (8, 16, 32)]
    ratios = [resid[i] / resid[i + 1] for i in range(2) if resid[i + 1]]
    order_ok = bool(ratios) and all(11.0 <= r <= 22.0 for r in ratios)

    budget_ok = all(
        one_parameter_check(c, 4, 64) <= 10.0 / 64**4
        for c in (
            x1,
            Series.from_terms({(0,): Fraction(1), (1,): Fraction(1)}, m=1, trunc=4),
            extend_truncation(random_rational_series(3, seed=[seed, 5], density=0.8), 4),
        )
    )

    return [
        CheckResult("triangular access assertion never fires at L=5", triangular, str(reads)),
        CheckResult("startODE words match direct quadrature to 1e-12", start_ode_ok, f"{worst:.1e}"),
        CheckResult("one-parameter residual c=x1 L=4 steps=256 <= 1e-8", r256 <= 1e-8, f"{r256:.1e}"),
        CheckResult("hand value (gamma(1), x0x1) = 1/2 to 1e-8", hand <= 1e-8, f"{hand:.1e}"),
        CheckResult(
            "one-parameter residual shrinks ~16x per step doubling (L=5)",
            order_ok,
            ", ".join(f"{r:.1f}" for r in ratios),
        ),
        CheckResult("one-parameter residual <= 10 h^4 across curves", budget_ok),
    ]


def check_volterra() -> list[CheckResult]:
    eta = Series.from_terms({(1,): Fraction(1, 2), (0,): Fraction(1, 3)}, m=1, trunc=5)
    curve = LieAlgebraCurve.constant_curve(eta)
    got = shuffle_volterra(curve, 1.0, 5, 4096)
    expect = Series.one(1, 5)
    power = Series.one(1, 5)
    for n in range(1, 6):
        power = shuffle(power, eta, 5)
        expect = add(expect, scale(power, Fraction(1, math.factorial(n))))
    closed_err = float(max_abs_coefficient(subtract(got, expect)))

    residuals = []
    for steps in (64, 128):
        path = volterra_path(curve, 1.0, 4, steps)
        h = 1.0 / steps
        worst = 0.0
        for i in range(1, steps):
            fd = scale_series(subtract(path[i + 1], path[i - 1]), 1 / (2 * h))
            rhs = shuffle(path[i], eta, 4)
            worst = max(worst, float(max_abs_coefficient(subtract(fd, rhs))))
        residuals.append(worst)
    ratio = residuals[0] / residuals[1] if residuals[1] else float("inf")

    return [
        CheckResult(
            "Volterra constant-curve closed form to 1e-8 at L=5",
            closed_err <= 1e-8,
            f"{closed_err:.1e}",
        ),
        CheckResult(
            "Volterra derivative residual is O(step^2)",
            3.0 <= ratio <= 5.0,
            f"ratio {ratio:.2f}",
        ),
    ]


SUITES = {
    "group-axioms": lambda: check_group_axioms() + [check_inverse_antimorphism()],
    "shuffle-group": lambda: check_shuffle_group(),
    "bounds": lambda: (
        check_bk_table()
        + [check_bk_majorant()]
        + check_shuffle_bound()
        + check_composition_bound()
        + [check_shuffle_power_majorant()]
    ),
    "fliess-numeric": lambda: check_interconnection_numerics() + check_realizations(),
    "evolution": lambda: check_evolution() + check_volterra(),
}


def run_suite(name: str) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
