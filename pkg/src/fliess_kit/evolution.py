"""Evolution equations on the output-feedback group and the shuffle group.

evolve() integrates the right-translation equation gamma' = c(t) + gamma <| c(t)
level by word length on [0, 1]: words without x0 reduce to plain quadrature
of their curve coefficient (the pre-Lie action always inserts an x0), and
the remaining words of each length form a linear system whose coupling
matrix involves only the empty-word coefficient of the curve.  Levels are
solved in order and each level reads strictly lower levels plus its own
state, which is asserted at run time, not assumed.

shuffle_volterra() realizes the nested-integral series solving the
corresponding initial value problem in the shuffle algebra.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import (
    ComponentMismatch,
    OrderCapExceeded,
    TriangularityViolation,
    TruncationMismatch,
)
from .products import _prelie_letter_dicts, _word_prelie_map, shuffle
from .series import Series, add, max_abs_coefficient, serialize_series, subtract
from .words import enumerate_words


class LieAlgebraCurve:
    """Samplable curve t in [0, 1] -> m-component series of one truncation.

    Continuity is the caller's declaration; evaluations are cached by time,
    which makes constant curves free to resample.
    """

    def __init__(self, evaluate: Callable, m=1, trunc=None, constant=False, continuity="C0"):
        self._evaluate = evaluate
        self.m = m
        self.trunc = trunc
        self.constant = constant
        self.continuity = continuity
        self._cache: dict = {}

    @classmethod
    def constant_curve(cls, c: Series) -> "LieAlgebraCurve":
        if c.ell != c.m:
            raise ComponentMismatch(
                f"Lie algebra elements need m={c.m} components, got {c.ell}"
            )
        return cls(lambda t: c, m=c.m, trunc=c.trunc, constant=True, continuity="Cinf")

    def __call__(self, t) -> Series:
        key = 0.0 if self.constant else float(t)
        got = self._cache.get(key)
        if got is None:
            got = self._evaluate(key)
            if got.ell != self.m or got.m != self.m:
                raise ComponentMismatch("curve sample has the wrong shape")
            if self.trunc is None:
                self.trunc = got.trunc
            if got.trunc < self.trunc:
                raise TruncationMismatch("curve sample truncated below declared length")
            self._cache[key] = got
        return got


class GroupPath:
    """Solution samples of the group evolution on the half-step grid."""

    def __init__(self, m, L, steps, values, metadata):
        self.m = m
        self.L = L
        self.steps = steps
        self.values = values  # word -> ndarray (2*steps + 1, m)
        self.metadata = metadata
        self.times = np.linspace(0.0, 1.0, steps + 1)
        self.half_times = np.linspace(0.0, 1.0, 2 * steps + 1)

    def _index(self, t) -> int:
        idx = int(round(float(t) * 2 * self.steps))
        if not 0 <= idx <= 2 * self.steps or abs(self.half_times[idx] - t) > 1e-12:
            raise ValueError(f"time {t} is not on the solver grid")
        return idx

    def body_at(self, t) -> Series:
        idx = self._index(t)
        comps = []
        for j in range(self.m):
            d = {}
            for word, arr in self.values.items():
                v = float(arr[idx, j])
                if v:
                    d[word] = v
            comps.append(d)
        return Series(self.m, self.L, tuple(comps), validate=False)

    def at(self, t):
        from .groups import UnitalSeries

        return UnitalSeries(self.body_at(t))

    def export(self, directory, times, curve=None) -> str:
        """Write one series file per requested time plus a manifest."""
        import os

        os.makedirs(directory, exist_ok=True)
        manifest = []
        for i, t in enumerate(times):
            body = self.body_at(t)
            name = f"gamma_{i:03d}.series"
            with open(os.path.join(directory, name), "w") as fh:
                fh.write(serialize_series(body) + "\n")
            res = 0.0 if curve is None else derivative_defect(self, curve, t)
            manifest.append(
                f"t={format(float(t), '.17g')} file={name} residual={format(res, '.17g')}"
            )
        text = "\n".join(manifest)
        with open(os.path.join(directory, "manifest.txt"), "w") as fh:
            fh.write(text + "\n")
        return text


def _coeff_vector(c: Series, word, m) -> np.ndarray:
    return np.array(
        [float(c.components[j].get(word, 0)) for j in range(m)], dtype=float
    )


def _prelie_weight_tables(m, L):
    """Word-level pre-Lie structure constants.

    For every left word rho, component index j and right word xi with
    |rho| >= 1 and |rho| + |xi| <= L, tables[(rho, j, xi)] maps an output
    word eta of length |rho| + |xi| to its exact coefficient in the
    pre-Lie action of rho against the basis series carrying xi in
    component j.
    """
    tables = {}
    for n in range(1, L + 1):
        for rho in enumerate_words(m, n):
            for j in range(1, m + 1):
                for k in range(L - n + 1):
                    for xi in enumerate_words(m, k):
                        d_letter = [dict() for _ in range(m + 1)]
                        d_letter[j] = {xi: Fraction(1)}
                        got = _word_prelie_map(rho, d_letter, L, {})
                        if got:
                            tables[(rho, j, xi)] = got
    return tables


def evolve(curve: LieAlgebraCurve, L: int, steps: int, track_access=False) -> GroupPath:
    """Integrate the group evolution equation level by level on [0, 1].

    Words without x0 are integrated by the trapezoid rule on the step
    grid; each remaining length level is advanced by classical 4th-order
    steps on its inhomogeneous linear system, reading lower levels at the
    shared half-step grid.  Reading a coefficient that has not been solved
    yet raises TriangularityViolation.
    """
    if steps < 1 or L < 0:
        raise ValueError("need steps >= 1 and L >= 0")
    m = curve.m
    if curve.trunc is not None and curve.trunc < L:
        raise TruncationMismatch(f"curve truncated at {curve.trunc}, need {L}")
    h = 1.0 / steps
    npts = 2 * steps + 1
    half_times = np.linspace(0.0, 1.0, npts)
    cvals = [curve(t) for t in half_times]

    tables = _prelie_weight_tables(m, L)

    # empirical check of the vanishing same-length diagonal (exact)
    diagonal_zero = True
    for (rho, j, xi), table in tables.items():
        if not xi and rho in table:
            diagonal_zero = False
    metadata = {"steps": steps, "L": L, "diagonal_zero": diagonal_zero}
    if not diagonal_zero:
        metadata["diagonal_warning"] = "same-length coupling has nonzero diagonal"

    values: dict = {}
    access_log: list = []
    current_level = 0

    def gamma_at(word, idx) -> np.ndarray:
        arr = values.get(word)
        if arr is None:
            raise TriangularityViolation(
                f"level {current_level} read unsolved coefficient at {word}"
            )
        if track_access:
            access_log.append((current_level, len(word)))
        return arr[idx]

    for level in range(L + 1):
        current_level = level
        level_words = enumerate_words(m, level)
        free_words = [w for w in level_words if 0 not in w]
        x0_words = [w for w in level_words if 0 in w]

        # (a) words without x0: plain trapezoid quadrature of the curve
        for word in free_words:
            f = np.array([_coeff_vector(cv, word, m) for cv in cvals])
            y = np.zeros((npts, m))
            for k in range(steps):
                e, mid, nxt = 2 * k, 2 * k + 1, 2 * k + 2
                y[nxt] = y[e] + (h / 2.0) * (f[e] + f[nxt])
                y[mid] = y[e] + (h / 4.0) * (f[e] + f[mid])
            values[word] = y

        if not x0_words:
            continue

        w = len(x0_words)
        index = {word: i for i, word in enumerate(x0_words)}

        # couplings within the level (empty right word) and weights against
        # already-solved words (lower length, or same length without x0)
        a_entries = []  # (row eta, col rho, j, coeff)
        b_entries = []  # (row eta, rho word, j, xi, coeff)
        for (rho, j, xi), table in tables.items():
            total = len(rho) + len(xi)
            if total != level:
                continue
            for eta, coeff in table.items():
                row = index.get(eta)
                if row is None:
                    continue
                if len(rho) == level and rho in index:
                    a_entries.append((row, index[rho], j, float(coeff)))
                else:
                    b_entries.append((row, rho, j, xi, float(coeff)))

        def matrix_at(idx):
            A = np.zeros((w, w))
            cv = cvals[idx]
            for row, col, j, coeff in a_entries:
                v = cv.components[j - 1].get((), 0)
                if v:
                    A[row, col] += coeff * float(v)
            return A

        def inhomogeneity_at(idx):
            cv = cvals[idx]
            b = np.zeros((w, m))
            for i, eta in enumerate(x0_words):
                b[i] = _coeff_vector(cv, eta, m)
            for row, rho, j, xi, coeff in b_entries:
                v = cv.components[j - 1].get(xi, 0)
                if v:
                    b[row] += coeff * float(v) * gamma_at(rho, idx)
            return b

        if curve.constant:
            A0 = matrix_at(0)
            matrices = lambda idx: A0  # noqa: E731
        else:
            matrices = matrix_at

        V = np.zeros((w, m))
        arrs = np.zeros((npts, w, m))
        for k in range(steps):
            e, mid, nxt = 2 * k, 2 * k + 1, 2 * k + 2
            Ae, Am, An = matrices(e), matrices(mid), matrices(nxt)
            be, bm, bn = (
                inhomogeneity_at(e),
                inhomogeneity_at(mid),
                inhomogeneity_at(nxt),
            )
            k1 = Ae @ V + be
            k2 = Am @ (V + (h / 2) * k1) + bm
            k3 = Am @ (V + (h / 2) * k2) + bm
            k4 = An @ (V + h * k3) + bn
            Vn = V + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            # cubic Hermite midpoint from endpoint values and slopes
            fn = An @ Vn + bn
            arrs[mid] = 0.5 * (V + Vn) + (h / 8.0) * (k1 - fn)
            arrs[nxt] = Vn
            V = Vn
        for word, i in index.items():
            values[word] = arrs[:, i, :]

    if track_access:
        per_level = {}
        for lvl, read in access_log:
            per_level[lvl] = max(per_level.get(lvl, 0), read)
        metadata["max_read_level"] = per_level
    return GroupPath(m, L, steps, values, metadata)


def derivative_defect(path: GroupPath, curve: LieAlgebraCurve, t) -> float:
    """Half-step central-difference defect of the evolution equation at t."""
    from .products import pre_lie

    h2 = 0.5 / path.steps
    if not h2 <= t <= 1 - h2:
        raise ValueError("defect needs an interior grid time")
    fd = subtract(path.body_at(t + h2), path.body_at(t - h2))
    c_t = curve(t)
    rhs = add(c_t.truncated(path.L), pre_lie(path.body_at(t), c_t, path.L))
    defect = subtract(
        Series(
            fd.m,
            fd.trunc,
            tuple({w: v / (2 * h2) for w, v in comp.items()} for comp in fd.components),
            validate=False,
        ),
        rhs,
    )
    return float(max_abs_coefficient(defect))


def one_parameter_check(c: Series, L: int, steps: int) -> float:
    """Residual of gamma(1/2) * gamma(1/2) = gamma(1) for a constant curve.

    Max magnitude over coefficients; steps must be even so 1/2 is a grid
    point of the solve.
    """
    from .groups import group_product

    if steps % 2:
        raise ValueError("steps must be even so t = 1/2 lies on the grid")
    path = evolve(LieAlgebraCurve.constant_curve(c), L, steps)
    half = path.at(0.5)
    full = path.body_at(1.0)
    combined = group_product(half, half, L)
    return float(max_abs_coefficient(subtract(combined.body, full)))


def volterra_path(
    curve: LieAlgebraCurve,
    T: float,
    L: int,
    steps: int,
    order_cap: int | None = None,
    tail_tol: float = 1e-9,
) -> list:
    """Grid values of the nested-integral series on [0, T].

    gamma(t) = 1 + sum_n I_n(t) with I_n(t) the simplex integral of n
    curve factors under the shuffle product, realized iteratively by
    trapezoid convolution: I_n(t) integrates I_{n-1} sh curve.  For proper
    curve values the sum terminates at n = L; otherwise it is capped and
    the unreached tail is estimated from the last term, raising
    OrderCapExceeded above tail_tol.
    """
    if steps < 1:
        raise ValueError("need steps >= 1")
    ts = np.linspace(0.0, float(T), steps + 1)
    h = ts[1] - ts[0]
    etas = [curve(min(t, 1.0)) for t in ts]
    m, ell = etas[0].m, etas[0].ell
    all_proper = all(
        not any(comp.get(()) for comp in eta.components) for eta in etas
    )
    cap = L if all_proper else (order_cap if order_cap is not None else 2 * L + 4)

    gamma = [Series.one(m, L, ell) for _ in ts]
    prev = [Series.one(m, L, ell) for _ in ts]
    last_term_mag = 0.0
    for n in range(1, cap + 1):
        f = [shuffle(prev[i], etas[i], L) for i in range(len(ts))]
        cur = [Series.zero(m, L, ell)]
        for i in range(1, len(ts)):
            inc = scale_series(add(f[i - 1], f[i]), h / 2.0)
            cur.append(add(cur[i - 1], inc))
        gamma = [add(g, c) for g, c in zip(gamma, cur)]
        last_term_mag = max(float(max_abs_coefficient(c)) for c in cur)
        if last_term_mag == 0.0:
            break
        prev = cur
    if not all_proper and last_term_mag > tail_tol:
        raise OrderCapExceeded(
            f"order cap {cap} leaves tail estimate {last_term_mag:.3e} > {tail_tol:.1e}"
        )
    return gamma


def scale_series(c: Series, s: float) -> Series:
    comps = tuple(
        {w: float(v) * s for w, v in comp.items() if float(v) * s != 0.0}
        for comp in c.components
    )
    return Series(c.m, c.trunc, comps, validate=False)


def shuffle_volterra(
    curve: LieAlgebraCurve,
    t: float,
    L: int,
    steps: int,
    order_cap: int | None = None,
    tail_tol: float = 1e-9,
) -> Series:
    """Value of the nested-integral series at time t (grid endpoint)."""
    return volterra_path(curve, t, L, steps, order_cap, tail_tol)[-1]
