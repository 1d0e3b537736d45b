"""Numerical Chen-Fliess evaluation and realization-to-series conversion.

Iterated integrals are computed by recursive trapezoid quadrature on a
uniform grid (the recursion only ever integrates grid-sampled integrands,
and second order is enough at desk scale).  Realizations convert to series
through exact iterated Lie derivatives; reference trajectories come from a
classical fixed-step 4th-order integrator.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ComponentMismatch,
    GridTooCoarse,
    LoopDiverged,
    SeriesSyntaxError,
)
from .poly import Polynomial
from .series import Series


class InputSignal:
    """Control signal sampled on a uniform grid over [t0, t1].

    values has shape (n, m); channel 0 is the implicit constant 1 attached
    to the drift letter x0.
    """

    __slots__ = ("t0", "t1", "times", "values")

    def __init__(self, t0, t1, values):
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[0] == 1 and values.shape[1] > 1 and values.ndim == 2:
            # accept a flat list for m = 1
            values = values.T if values.shape[0] == 1 else values
        if values.shape[0] < 2:
            raise GridTooCoarse("input signal needs at least two samples")
        if not np.all(np.isfinite(values)):
            raise ValueError("input signal contains non-finite samples")
        if not t1 > t0:
            raise ValueError("need t1 > t0")
        self.t0 = float(t0)
        self.t1 = float(t1)
        self.times = np.linspace(self.t0, self.t1, values.shape[0])
        self.values = values

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def step(self) -> float:
        return self.times[1] - self.times[0]

    @classmethod
    def from_function(cls, f: Callable, t0, t1, n, m=1):
        ts = np.linspace(t0, t1, n)
        vals = np.empty((n, m))
        for i, t in enumerate(ts):
            v = f(t)
            vals[i, :] = v
        return cls(t0, t1, vals)

    @classmethod
    def zero(cls, t0, t1, n, m=1):
        return cls(t0, t1, np.zeros((n, m)))

    def channel(self, letter: int) -> np.ndarray:
        """Samples of u_letter; letter 0 is the constant 1."""
        if letter == 0:
            return np.ones(len(self.times))
        return self.values[:, letter - 1]

    def replace_values(self, values) -> "InputSignal":
        return InputSignal(self.t0, self.t1, values)

    def index_of(self, t, tol=1e-9) -> int | None:
        idx = int(round((t - self.t0) / self.step))
        if 0 <= idx < len(self.times) and abs(self.times[idx] - t) <= tol * max(1.0, abs(t)):
            return idx
        return None


_SIGNAL_HEADER_RE = re.compile(
    r"#\s*t0=(?P<t0>\S+)\s+t1=(?P<t1>\S+)\s+m=(?P<m>\d+)\s*$"
)


def parse_input_signal(text: str) -> InputSignal:
    """Parse the signal format: header line, then 't u1 .. um' rows."""
    header = None
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hm = _SIGNAL_HEADER_RE.match(line)
            if hm and header is None:
                header = (float(hm["t0"]), float(hm["t1"]), int(hm["m"]))
            continue
        try:
            nums = [float(tok) for tok in line.split()]
        except ValueError:
            raise SeriesSyntaxError(f"malformed sample row {raw!r}", line_no) from None
        rows.append((line_no, nums))
    if header is None:
        raise SeriesSyntaxError("missing '# t0=... t1=... m=...' header")
    t0, t1, m = header
    if not rows:
        raise SeriesSyntaxError("signal has no samples")
    times = []
    values = []
    for line_no, nums in rows:
        if len(nums) != m + 1:
            raise SeriesSyntaxError(
                f"expected {m + 1} columns, got {len(nums)}", line_no
            )
        times.append(nums[0])
        values.append(nums[1:])
    times = np.asarray(times)
    if len(times) < 2:
        raise GridTooCoarse("input signal needs at least two samples")
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise SeriesSyntaxError("sample times must increase strictly")
    h = (times[-1] - times[0]) / (len(times) - 1)
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise SeriesSyntaxError("sample spacing is not uniform within 1e-9")
    return InputSignal(times[0], times[-1], np.asarray(values))


def serialize_input_signal(u: InputSignal) -> str:
    lines = [f"# t0={u.t0:.17g} t1={u.t1:.17g} m={u.m}"]
    for t, row in zip(u.times, u.values):
        cols = " ".join(format(x, ".17g") for x in row)
        lines.append(f"{t:.17g} {cols}".rstrip())
    return "\n".join(lines)


def _cumtrapz(f: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(f)
    out[0] = 0.0
    np.cumsum((f[1:] + f[:-1]) * (h / 2.0), out=out[1:])
    return out


class IteratedIntegrals:
    """Grid evaluations of all requested iterated integrals of one signal.

    The recursion integrates suffix-first (the last letter of a word is the
    innermost integral), so arrays are shared across words with common
    suffixes.
    """

    def __init__(self, u: InputSignal):
        if len(u.times) < 2:
            raise GridTooCoarse("need at least two grid points")
        self.u = u
        self._arrays = {(): np.ones(len(u.times))}

    def array(self, word) -> np.ndarray:
        word = tuple(word)
        arr = self._arrays.get(word)
        if arr is not None:
            return arr
        letter, rest = word[0], word[1:]
        inner = self.array(rest)
        arr = _cumtrapz(self.u.channel(letter) * inner, self.u.step)
        self._arrays[word] = arr
        return arr

    def value(self, word, t) -> float:
        ts = self.u.times
        if not ts[0] <= t <= ts[-1] + 1e-12:
            raise ValueError(f"time {t} outside [{ts[0]}, {ts[-1]}]")
        arr = self.array(word)
        return float(np.interp(t, ts, arr))


def iterated_integral(word, u: InputSignal, t) -> float:
    """E_word[u](t, t0) by recursive trapezoid quadrature."""
    return IteratedIntegrals(u).value(word, t)


class FliessValue(NamedTuple):
    value: np.ndarray  # shape (ell,)
    top_stratum: float  # magnitude of the truncation-length stratum


def _coeff_float(v) -> float:
    return float(v)


def fliess_eval(c: Series, u: InputSignal, t, cache: IteratedIntegrals | None = None) -> FliessValue:
    """Truncated operator value sum_w (c,w) E_w[u](t).

    top_stratum reports the total magnitude contributed by words of maximal
    stored length, as a crude truncation-error indicator.
    """
    if u.m != c.m:
        raise ComponentMismatch(f"signal has m={u.m} channels, series expects {c.m}")
    cache = cache or IteratedIntegrals(u)
    out = np.zeros(c.ell)
    top = 0.0
    for j, comp in enumerate(c.components):
        for w, v in comp.items():
            term = _coeff_float(v) * cache.value(w, t)
            out[j] += term
            if len(w) == c.trunc:
                top += abs(term)
    return FliessValue(out, top)


def fliess_on_grid(c: Series, u: InputSignal, cache: IteratedIntegrals | None = None) -> np.ndarray:
    """Operator output on the whole grid, shape (n, ell)."""
    if u.m != c.m:
        raise ComponentMismatch(f"signal has m={u.m} channels, series expects {c.m}")
    cache = cache or IteratedIntegrals(u)
    out = np.zeros((len(u.times), c.ell))
    for j, comp in enumerate(c.components):
        for w, v in comp.items():
            out[:, j] += _coeff_float(v) * cache.array(w)
    return out


def cascade_check(c: Series, d: Series, u: InputSignal, t, L=None) -> float:
    """|F_c[F_d[u]](t) - F_{c o d}[u](t)| with the inner output re-sampled.

    L controls the truncation of the composed series (it defaults to the
    operands' shared truncation, which can understate the cascade tail for
    short truncations; pass a larger L when the inputs allow it).
    """
    from .products import compose

    inner = fliess_on_grid(d, u)
    u_inner = u.replace_values(inner)
    lhs = fliess_eval(c, u_inner, t).value
    L = L if L is not None else min(c.trunc, d.trunc)
    rhs = fliess_eval(compose(c, d, L), u, t).value
    return float(np.max(np.abs(lhs - rhs)))


# -- realizations -----------------------------------------------------------


def lie_derivative(g: Sequence[Polynomial], h: Polynomial, state_vars: Sequence[str]) -> Polynomial:
    """Directional derivative sum_i g_i dh/dz_i, exact."""
    if len(g) != len(state_vars):
        raise ComponentMismatch("vector field arity differs from the state dimension")
    out = Polynomial.constant(0)
    for gi, var in zip(g, state_vars):
        out = out + gi * h.diff(var)
    return out


class PolynomialRealization:
    """State-space data z' = g0(z) + sum_i g_i(z) u_i, y = h(z), z(0) = z0.

    Vector fields and outputs are exact polynomials; initial-state entries
    may be rationals or parameter polynomials, so conversions can stay
    symbolic in the growth constants.
    """

    __slots__ = ("state_vars", "m", "vector_fields", "outputs", "initial_state")

    def __init__(self, state_vars, vector_fields, outputs, initial_state):
        self.state_vars = tuple(state_vars)
        n = len(self.state_vars)
        fields = tuple(tuple(f) for f in vector_fields)
        if not fields:
            raise ComponentMismatch("need at least the drift field g0")
        for f in fields:
            if len(f) != n:
                raise ComponentMismatch("each vector field needs one entry per state")
        self.vector_fields = fields
        self.m = len(fields) - 1
        self.outputs = tuple(outputs)
        if len(initial_state) != n:
            raise ComponentMismatch("initial state dimension mismatch")
        self.initial_state = tuple(initial_state)

    @property
    def n(self) -> int:
        return len(self.state_vars)

    @property
    def ell(self) -> int:
        return len(self.outputs)


def realization_to_series(r: PolynomialRealization, L: int) -> Series:
    """Generating series coefficients as iterated Lie derivatives at z0.

    The first letter of a word indexes the innermost derivative, so the
    polynomial for word + (i,) is the g_i-derivative of the word's
    polynomial.  Coefficients stay exact; they are rationals when z0 is
    numeric and parameter polynomials otherwise.
    """
    subs_z = {var: z for var, z in zip(r.state_vars, r.initial_state)}
    letters = range(r.m + 1)
    comps = []
    for h in r.outputs:
        polys = {(): h}
        frontier = [()]
        for _ in range(L):
            nxt = []
            for word in frontier:
                base = polys[word]
                if not base:
                    continue
                for i in letters:
                    p = lie_derivative(r.vector_fields[i], base, r.state_vars)
                    if p:
                        polys[word + (i,)] = p
                        nxt.append(word + (i,))
            frontier = nxt
        comp = {}
        for word, p in polys.items():
            value = p.subs(subs_z)
            if value.is_constant():
                fr = value.constant_value()
                if fr:
                    comp[word] = fr
            elif value:
                comp[word] = value
        comps.append(comp)
    return Series(r.m, L, tuple(comps), validate=False)


def simulate_realization(r: PolynomialRealization, u: InputSignal, substeps=2) -> np.ndarray:
    """Reference output trajectory by classical 4th-order fixed steps.

    Integrates on the signal grid with `substeps` internal steps per grid
    interval, evaluating u by linear interpolation at stage times.  The
    realization must be numeric (no free parameters).
    """
    funcs = []
    for field in r.vector_fields:
        funcs.append([_poly_evaluator(p, r.state_vars) for p in field])
    outs = [_poly_evaluator(p, r.state_vars) for p in r.outputs]
    z = np.array([float(Fraction(v) if isinstance(v, int) else v) if not isinstance(v, Polynomial) else float(v.constant_value()) for v in r.initial_state], dtype=float)

    ts = u.times
    uvals = u.values

    def u_at(t):
        return np.array([np.interp(t, ts, uvals[:, i]) for i in range(u.m)])

    def rhs(t, state):
        ut = u_at(t)
        dz = np.array([f(state) for f in funcs[0]])
        for i in range(1, r.m + 1):
            dz += ut[i - 1] * np.array([f(state) for f in funcs[i]])
        return dz

    y = np.zeros((len(ts), r.ell))
    y[0] = [f(z) for f in outs]
    for k in range(len(ts) - 1):
        t, h = ts[k], (ts[k + 1] - ts[k]) / substeps
        for _ in range(substeps):
            k1 = rhs(t, z)
            k2 = rhs(t + h / 2, z + h / 2 * k1)
            k3 = rhs(t + h / 2, z + h / 2 * k2)
            k4 = rhs(t + h, z + h * k3)
            z = z + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        y[k + 1] = [f(z) for f in outs]
    return y


def _poly_evaluator(p: Polynomial, state_vars):
    vars_ = p.vars

    def ev(state):
        env = dict(zip(state_vars, state))
        total = 0.0
        for exps, coeff in p.terms.items():
            term = float(coeff)
            for var, e in zip(vars_, exps):
                if e:
                    term *= env[var] ** e
            total += term
        return total

    return ev


def feedback_loop_simulate(
    c: Series,
    d: Series,
    v: InputSignal,
    iterations: int = 10,
) -> tuple[InputSignal, list[float]]:
    """Picard iteration for the loop y = F_c[v + F_d[y]], starting from 0.

    Returns the last iterate as a signal together with the sup-norm Cauchy
    increments; raises LoopDiverged when the increments grow three times in
    a row (the loop only contracts for small inputs and short horizons).
    """
    if iterations < 1:
        raise ValueError("need at least one iteration")
    n = len(v.times)
    y = np.zeros((n, 1))
    increments: list[float] = []
    grow = 0
    for _ in range(iterations):
        w = fliess_on_grid(d, v.replace_values(y))
        u_total = v.replace_values(v.values + w)
        y_next = fliess_on_grid(c, u_total)
        inc = float(np.max(np.abs(y_next - y)))
        if increments and inc > increments[-1]:
            grow += 1
            if grow >= 3:
                raise LoopDiverged(
                    f"Picard increments grew 3 times in a row (last {inc:.3e})"
                )
        else:
            grow = 0
        increments.append(inc)
        y = y_next
    return v.replace_values(y), increments
