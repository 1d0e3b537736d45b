"""Sparse multivariate polynomials with exact rational coefficients.

Carrier for the Lie-derivative calculus and for series coefficients that
depend symbolically on growth constants.  Exponents may be negative on
parameter variables (Laurent terms such as M/K), which is exactly what the
realization data needs; state variables keep nonnegative exponents because
differentiation and substitution never lower a nonnegative power below 0.

Terms map exponent vectors to nonzero Fractions and are kept canonical.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import SeriesSyntaxError


def _as_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Polynomial:
    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms, validate=True):
        vars = tuple(vars)
        if validate:
            clean = {}
            for exps, coeff in terms.items():
                exps = tuple(exps)
                if len(exps) != len(vars):
                    raise ValueError("exponent vector length mismatch")
                coeff = _as_fraction(coeff)
                if coeff:
                    clean[exps] = clean.get(exps, Fraction(0)) + coeff
            terms = {e: c for e, c in clean.items() if c}
        self.vars = vars
        self.terms = terms

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value, vars=()):
        value = _as_fraction(value)
        if not value:
            return cls(vars, {}, validate=False)
        return cls(tuple(vars), {(0,) * len(vars): value}, validate=False)

    @classmethod
    def monomial(cls, powers: dict, coeff=1, vars=None):
        """coeff * prod(var**e); exponents may be negative."""
        if vars is None:
            vars = tuple(sorted(powers))
        vars = tuple(vars)
        exps = tuple(powers.get(v, 0) for v in vars)
        coeff = _as_fraction(coeff)
        if not coeff:
            return cls(vars, {}, validate=False)
        return cls(vars, {exps: coeff}, validate=False)

    @classmethod
    def variable(cls, name, vars=None):
        return cls.monomial({name: 1}, 1, vars=vars or (name,))

    def with_vars(self, vars) -> "Polynomial":
        """Re-express over a superset of the current variables."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        missing = [v for v in self.vars if v not in vars]
        if missing:
            # only variables that never occur may be dropped
            for exps in self.terms:
                for v, e in zip(self.vars, exps):
                    if v in missing and e:
                        raise ValueError(f"cannot drop live variable {v}")
        index = {v: i for i, v in enumerate(self.vars)}
        terms = {}
        for exps, coeff in self.terms.items():
            new = tuple(exps[index[v]] if v in index else 0 for v in vars)
            terms[new] = coeff
        return Polynomial(vars, terms, validate=False)

    # -- predicates and views -----------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    def univariate_coeffs(self, var) -> list:
        """Ascending coefficient list in `var`; all other variables must be dead."""
        if var not in self.vars:
            if self.is_constant():
                return [self.constant_value()] if self.terms else []
            raise ValueError(f"{var} not among {self.vars}")
        i = self.vars.index(var)
        by_degree: dict[int, Fraction] = {}
        for exps, coeff in self.terms.items():
            if any(e for k, e in enumerate(exps) if k != i):
                raise ValueError(f"{self} is not univariate in {var}")
            if exps[i] < 0:
                raise ValueError(f"{self} has a negative power of {var}")
            by_degree[exps[i]] = coeff
        top = max(by_degree, default=-1)
        return [by_degree.get(k, Fraction(0)) for k in range(top + 1)]

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _aligned(a: "Polynomial", b: "Polynomial"):
        if a.vars == b.vars:
            return a, b
        merged = tuple(sorted(set(a.vars) | set(b.vars)))
        return a.with_vars(merged), b.with_vars(merged)

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        return Polynomial.constant(other, self.vars)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other, self.vars)
        elif not isinstance(other, Polynomial):
            return NotImplemented
        a, b = Polynomial._aligned(self, other)
        return a.terms == b.terms

    def __hash__(self):
        live = [
            (tuple(p for p, v in zip(exps, self.vars) if p), coeff)
            for exps, coeff in self.terms.items()
        ]
        return hash(frozenset(live))

    def __add__(self, other):
        a, b = Polynomial._aligned(self, self._coerce(other))
        terms = dict(a.terms)
        for exps, coeff in b.terms.items():
            s = terms.get(exps, Fraction(0)) + coeff
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return Polynomial(a.vars, terms, validate=False)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(
            self.vars, {e: -c for e, c in self.terms.items()}, validate=False
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            if not other:
                return Polynomial(self.vars, {}, validate=False)
            return Polynomial(
                self.vars,
                {e: c * other for e, c in self.terms.items()},
                validate=False,
            )
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = Polynomial._aligned(self, other)
        terms: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                s = terms.get(key, Fraction(0)) + c1 * c2
                if s:
                    terms[key] = s
                else:
                    del terms[key]
        return Polynomial(a.vars, terms, validate=False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / _as_fraction(other))
        if isinstance(other, Polynomial):
            return self * other.reciprocal()
        return NotImplemented

    def reciprocal(self) -> "Polynomial":
        """Inverse of a single-term polynomial (monomial)."""
        if len(self.terms) != 1:
            raise ValueError(f"cannot invert the non-monomial {self}")
        (exps, coeff), = self.terms.items()
        return Polynomial(
            self.vars,
            {tuple(-e for e in exps): Fraction(1) / coeff},
            validate=False,
        )

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.reciprocal() ** (-n)
        out = Polynomial.constant(1, self.vars)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    # -- calculus ------------------------------------------------------------

    def diff(self, var) -> "Polynomial":
        if var not in self.vars:
            return Polynomial(self.vars, {}, validate=False)
        i = self.vars.index(var)
        terms = {}
        for exps, coeff in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            new = list(exps)
            new[i] = e - 1
            key = tuple(new)
            s = terms.get(key, Fraction(0)) + coeff * e
            if s:
                terms[key] = s
        return Polynomial(self.vars, terms, validate=False)

    def subs(self, mapping: dict) -> "Polynomial":
        """Substitute polynomials (or rationals) for some variables.

        A variable carrying negative exponents can only be replaced by a
        monomial or a nonzero rational.
        """
        values = {}
        for var, val in mapping.items():
            if not isinstance(val, Polynomial):
                val = Polynomial.constant(val)
            values[var] = val
        keep = tuple(v for v in self.vars if v not in values)
        out = Polynomial(keep, {}, validate=False)
        for exps, coeff in self.terms.items():
            term = Polynomial.constant(coeff, keep)
            for var, e in zip(self.vars, exps):
                if e == 0:
                    continue
                if var in values:
                    term = term * values[var] ** e
                else:
                    term = term * Polynomial.monomial({var: e}, 1, vars=keep)
            out = out + term
        return out

    def evaluate(self, mapping: dict):
        """Full numeric evaluation; arithmetic follows the supplied values."""
        total = 0
        for exps, coeff in self.terms.items():
            term = coeff if coeff.denominator != 1 else coeff.numerator
            for var, e in zip(self.vars, exps):
                if e:
                    term = term * mapping[var] ** e
            total = total + term
        return total

    # -- text ----------------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        def key(item):
            exps, _ = item
            return (sum(exps), exps)
        parts = []
        for exps, coeff in sorted(self.terms.items(), key=key):
            factors = []
            for var, e in zip(self.vars, exps):
                if e == 1:
                    factors.append(var)
                elif e:
                    factors.append(f"{var}^{e}")
            if not factors:
                parts.append(str(coeff))
                continue
            body = "*".join(factors)
            if coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out


def variables(names: str):
    """Split a whitespace-separated name list into polynomial generators."""
    names = tuple(names.split())
    return tuple(Polynomial.variable(n, vars=names) for n in names)


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        mt = _TOKEN_RE.match(text, pos)
        if not mt or mt.end() == pos:
            raise SeriesSyntaxError(f"bad polynomial syntax near {text[pos:pos+12]!r}")
        out.append((mt.lastgroup, mt.group(mt.lastgroup)))
        pos = mt.end()
    out.append(("end", ""))
    return out


def parse_polynomial(text: str, vars=None) -> Polynomial:
    """Parse '+ - * / ^' expressions over rationals and named variables.

    Division requires a monomial divisor (so M/K parses, 1/(1+K) does not);
    exponents are nonnegative integers.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind=None, value=None):
        nonlocal pos
        k, v = tokens[pos]
        if (kind and k != kind) or (value and v != value):
            raise SeriesSyntaxError(f"unexpected {v!r} in polynomial {text!r}")
        pos += 1
        return v

    def parse_expr():
        k, v = peek()
        negate = False
        if k == "op" and v in "+-":
            take()
            negate = v == "-"
        node = parse_term()
        if negate:
            node = -node
        while peek() == ("op", "+") or peek() == ("op", "-"):
            op = take()
            rhs = parse_term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def parse_term():
        node = parse_factor()
        while peek()[0] == "op" and peek()[1] in "*/":
            op = take()
            rhs = parse_factor()
            if op == "*":
                node = node * rhs
            else:
                try:
                    node = node * rhs.reciprocal()
                except ValueError as exc:
                    raise SeriesSyntaxError(str(exc)) from None
        return node

    def parse_factor():
        node = parse_atom()
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            exp = take("num")
            if "/" in exp:
                raise SeriesSyntaxError("exponents must be integers")
            return node ** (sign * int(exp))
        return node

    def parse_atom():
        k, v = peek()
        if k == "num":
            take()
            return Polynomial.constant(Fraction(v))
        if k == "name":
            take()
            return Polynomial.variable(v)
        if (k, v) == ("op", "("):
            take()
            node = parse_expr()
            take("op", ")")
            return node
        if (k, v) == ("op", "-"):
            take()
            return -parse_atom()
        raise SeriesSyntaxError(f"unexpected {v!r} in polynomial {text!r}")

    node = parse_expr()
    take("end")
    if vars is not None:
        node = node.with_vars(tuple(vars))
    return node
