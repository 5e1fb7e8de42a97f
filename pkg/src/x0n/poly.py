"""Sparse exact multivariate polynomials over Q with a small text parser.

``Poly(("X", "Y"), ...)`` plays the role of the bivariate polynomials in
the minimal equation and the J-representation; the same class carries
polynomials in the generators F_1..F_{g+1}.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, lcm

__all__ = ["Poly", "PolyParseError", "poly_det"]


class PolyParseError(ValueError):
    pass


def _frac(c):
    c = Fraction(c)
    return c


class Poly:
    """Immutable sparse polynomial: {exponent tuple: Fraction}."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        t = {}
        if terms:
            n = len(self.vars)
            for e, c in terms.items():
                c = _frac(c)
                if c:
                    e = tuple(e)
                    if len(e) != n:
                        raise ValueError("exponent length does not match variables")
                    t[e] = t.get(e, 0) + c
                    if not t[e]:
                        del t[e]
        self.terms = t

    # -- constructors ----------------------------------------------------
    @classmethod
    def const(cls, vars, c) -> "Poly":
        return cls(vars, {(0,) * len(tuple(vars)): c})

    @classmethod
    def var(cls, vars, name: str, power: int = 1) -> "Poly":
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = power
        return cls(vars, {tuple(e): 1})

    @classmethod
    def univariate(cls, vars, name: str, coeffs) -> "Poly":
        """coeffs lowest degree first."""
        vars = tuple(vars)
        i = vars.index(name)
        terms = {}
        for k, c in enumerate(coeffs):
            e = [0] * len(vars)
            e[i] = k
            terms[tuple(e)] = c
        return cls(vars, terms)

    # -- basic queries ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(sum(e) for e in self.terms)
        i = self.vars.index(name)
        return max(e[i] for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def coeff_in(self, name: str, k: int) -> "Poly":
        """Coefficient of name^k as a polynomial in the remaining variables (same var tuple)."""
        i = self.vars.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                out[tuple(e2)] = c
        return Poly(self.vars, out)

    def univariate_coeffs(self, name: str) -> list[Fraction]:
        i = self.vars.index(name)
        for e in self.terms:
            if any(x for j, x in enumerate(e) if j != i):
                raise ValueError("polynomial is not univariate")
        d = self.degree(name)
        out = [Fraction(0)] * (d + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    def with_vars(self, vars) -> "Poly":
        """Re-embed into a larger (or reordered) variable tuple."""
        vars = tuple(vars)
        idx = [vars.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            if any(x and i < 0 for x, i in zip(e, idx)):
                raise ValueError("variable missing in target")
            e2 = [0] * len(vars)
            for x, i in zip(e, idx):
                e2[i] += x
            out[tuple(e2)] = c
        return Poly(vars, out)

    # -- arithmetic --------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Poly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        return Poly.const(self.vars, other)

    def __add__(self, other):
        o = self._lift(other)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = _frac(other)
            return Poly(self.vars, {e: v * c for e, v in self.terms.items()})
        o = self._lift(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.vars, t)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, Poly):
            if not c.is_constant():
                raise TypeError("division by a non-constant polynomial")
            c = c.constant_term()
        return self * (Fraction(1) / _frac(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.vars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- normalisation ---------------------------------------------------------
    def content(self) -> Fraction:
        """Positive rational c with self / c a primitive integer polynomial."""
        if not self.terms:
            return Fraction(1)
        den = 1
        for c in self.terms.values():
            den = lcm(den, c.denominator)
        g = 0
        for c in self.terms.values():
            g = gcd(g, int(c * den))
        return Fraction(g, den)

    def primitive(self) -> "Poly":
        return self / self.content() if self.terms else self

    def integer_cleared(self, lead_positive_of=None) -> "Poly":
        """Primitive integer multiple, sign fixed by the leading term in display order."""
        p = self.primitive()
        if not p.terms:
            return p
        lead = p.sorted_terms()[0][1] if lead_positive_of is None else lead_positive_of(p)
        return -p if lead < 0 else p

    def monic_in(self, name: str) -> "Poly":
        d = self.degree(name)
        lc = self.coeff_in(name, d)
        if not lc.is_constant():
            raise ValueError("leading coefficient is not constant")
        return self / lc.constant_term()

    # -- substitution / evaluation -------------------------------------------
    def evaluate(self, values: dict):
        """Evaluate with values for every variable; values may be any ring elements."""
        vals = [values[v] for v in self.vars]
        pow_cache: dict = {}

        def pw(i, k):
            key = (i, k)
            r = pow_cache.get(key)
            if r is None:
                if k == 1:
                    r = vals[i]
                elif k % 2 == 0:
                    h = pw(i, k // 2)
                    r = h * h
                else:
                    r = pw(i, k - 1) * vals[i]
                pow_cache[key] = r
            return r

        total = None
        for e, c in self.sorted_terms():
            m = None
            for i, k in enumerate(e):
                if k:
                    f = pw(i, k)
                    m = f if m is None else m * f
            term = c if m is None else m * c
            total = term if total is None else total + term
        return 0 if total is None else total

    def substitute(self, name: str, value: "Poly") -> "Poly":
        i = self.vars.index(name)
        value = value.with_vars(self.vars) if value.vars != self.vars else value
        out = Poly(self.vars)
        powers = {}
        for e, c in self.terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = value ** k
            e2 = list(e)
            e2[i] = 0
            out = out + Poly(self.vars, {tuple(e2): c}) * powers[k]
        return out

    def reduce_monic(self, name: str, modulus: "Poly") -> "Poly":
        """Remainder modulo ``modulus``, which must be monic (constant lc) in ``name``."""
        m = modulus.monic_in(name)
        d = m.degree(name)
        i = self.vars.index(name)
        tail = m - Poly.var(self.vars, name, d)  # name^d == -tail
        rem = dict(self.terms)
        while True:
            high = [e for e in rem if e[i] >= d]
            if not high:
                break
            e = max(high, key=lambda x: x[i])
            c = rem.pop(e)
            e2 = list(e)
            e2[i] -= d
            mult = Poly(self.vars, {tuple(e2): -c})
            for e3, c3 in (mult * tail).terms.items():
                rem[e3] = rem.get(e3, 0) + c3
                if not rem[e3]:
                    del rem[e3]
        return Poly(self.vars, rem)

    # -- text ---------------------------------------------------------------------
    def sorted_terms(self):
        """Display order: last variable's degree first, then earlier ones, descending."""
        return sorted(self.terms.items(), key=lambda ec: tuple(reversed(ec[0])), reverse=True)

    def _mono(self, e, style) -> str:
        parts = []
        for name, k in zip(self.vars, e):
            if k:
                nm = _display_name(name, style)
                parts.append(nm if k == 1 else f"{nm}^{k}")
        return "*".join(parts)

    def to_text(self, style: str = "plain") -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = self._mono(e, style)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            out.append(("-" if neg else "+", body))
        s = ("-" if out[0][0] == "-" else "") + out[0][1]
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Poly({self.vars}, {self.to_text()!r})"

    @classmethod
    def parse(cls, text: str, vars) -> "Poly":
        return _Parser(text, tuple(vars)).parse()


def _display_name(name: str, style: str) -> str:
    m = re.fullmatch(r"F(\d+)", name)
    if m and style == "plain":
        return f"F{m.group(1)}"
    if m and style == "sub":
        return f"F_{m.group(1)}"
    return name


_TOK = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<var>F_?\{?\d+\}?|[A-Za-z])|(?P<op>\*\*|[-+*/^()]))"
)


class _Parser:
    """Recursive descent: sums of products with implicit multiplication and ^."""

    def __init__(self, text: str, vars):
        self.vars = vars
        self.toks = []
        pos = 0
        text = text.replace("−", "-").replace("·", "*")
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOK.match(text, pos)
            if not m or m.end() == pos:
                raise PolyParseError(f"bad character at {text[pos:]!r}")
            pos = m.end()
            if m.group("num"):
                self.toks.append(("num", m.group("num")))
            elif m.group("var"):
                self.toks.append(("var", m.group("var")))
            else:
                op = m.group("op")
                self.toks.append(("op", "^" if op == "**" else op))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> Poly:
        p = self.expr()
        if self.i != len(self.toks):
            raise PolyParseError(f"trailing tokens: {self.toks[self.i:]}")
        return p

    def expr(self) -> Poly:
        kind, val = self.peek()
        sign = 1
        if (kind, val) in (("op", "-"), ("op", "+")):
            self.take()
            sign = -1 if val == "-" else 1
        p = self.term() * sign
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                p = p + t if val == "+" else p - t
            else:
                return p

    def term(self) -> Poly:
        p = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.power()
            elif kind == "op" and val == "/":
                self.take()
                q = self.power()
                if not q.is_constant():
                    raise PolyParseError("division by a non-constant")
                p = p / q.constant_term()
            elif kind in ("num", "var") or (kind == "op" and val == "("):
                p = p * self.power()
            else:
                return p

    def power(self) -> Poly:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            neg = False
            if (kind, val) == ("op", "{"):
                kind, val = self.take()
            if kind == "op" and val == "(":
                e = self.expr()
                self.take()
                if not e.is_constant():
                    raise PolyParseError("non-constant exponent")
                k = e.constant_term()
            elif kind == "num":
                k = Fraction(val)
            else:
                raise PolyParseError("bad exponent")
            if k.denominator != 1 or k < 0:
                raise PolyParseError("exponent must be a non-negative integer")
            return base ** int(k)
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return Poly.const(self.vars, Fraction(val))
        if kind == "var":
            name = val
            m = re.fullmatch(r"F_?\{?(\d+)\}?", name)
            if m:
                name = f"F{int(m.group(1))}"
            if name not in self.vars:
                raise PolyParseError(f"unknown variable {val!r} (expected one of {self.vars})")
            return Poly.var(self.vars, name)
        if kind == "op" and val == "(":
            p = self.expr()
            k2, v2 = self.take()
            if (k2, v2) != ("op", ")"):
                raise PolyParseError("missing ')'")
            return p
        raise PolyParseError(f"unexpected token {val!r}")


def poly_det(M) -> Poly:
    """Determinant of a small square matrix of Poly entries (Laplace, memoised minors)."""
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    memo: dict = {}

    def minor(rows: tuple, col: int):
        # determinant of the submatrix using ``rows`` and columns col..n-1
        if col == n - 1:
            return M[rows[0]][col]
        key = (rows, col)
        if key in memo:
            return memo[key]
        total = None
        for idx, r in enumerate(rows):
            entry = M[r][col]
            if entry.is_zero():
                continue
            sub = minor(rows[:idx] + rows[idx + 1 :], col + 1)
            t = entry * sub
            if idx % 2:
                t = -t
            total = t if total is None else total + t
        if total is None:
            total = Poly(M[0][0].vars)
        memo[key] = total
        return total

    return minor(tuple(range(n)), 0)
