"""q-expansions of Weierstrass p-quotients W_a and their traces at cusps.

For a cusp <u/D> with B(u,D) = [[u, c], [D, d]] and M = N/D, the
difference p(r(D tau + d)/N) - p(s(D tau + d)/N) is expanded in
q_D = exp(2 pi i tau D/N) as P(r) - P(s), where for an integer x with
e = {x}_D, mu = mu_D(x) and k = mu*x*d mod N (zeta = zeta_N):

    P(x) = sum_{n>=1} n zeta^{nk} q_D^{ne}                      (e > 0)
           zeta^k / (1 - zeta^k)^2                               (e = 0)
         + sum_{m>=1, n>=1} n (zeta^{nk} q_D^{n(mM+e)} + zeta^{-nk} q_D^{n(mM-e)})

Additive constants common to every P(x) cancel in the differences.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import CycNum, cyc_root_power
from .modcurve import (
    CuspClass,
    WVector,
    braces_mu,
    cusps_gamma0,
    trace_order_bound,
    units_mod_pm,
    w_order,
)
from .series import LaurentSeries, SeriesError, VarTag

__all__ = [
    "ExpansionError",
    "wp_diff",
    "w_expansion",
    "TraceTerm",
    "ModFuncExpr",
    "parse_expr",
    "trace_expansion",
    "clear_cache",
]


class ExpansionError(ArithmeticError):
    """Internal-consistency failure of an expansion (never swallowed)."""


def _wp_terms(x: int, Q: CuspClass, prec: int):
    """P(x) from the module docstring as {exponent: coefficient}, exponents < prec."""
    N, D = Q.N, Q.D
    M = N // D
    e, mu = braces_mu(x, D, N)
    k = (mu * x * Q.d) % N
    rational = k == 0
    acc: dict[int, list[int] | int] = {}

    def add(exp, n, power):
        if rational:
            acc[exp] = acc.get(exp, 0) + n
        else:
            slot = acc.get(exp)
            if slot is None:
                slot = acc[exp] = [0] * N
            slot[power % N] += n

    if e > 0:
        n = 1
        while n * e < prec:
            add(n * e, n, n * k)
            n += 1
    m = 1
    while m * M - e < prec:
        lo, hi = m * M - e, m * M + e
        n = 1
        while n * lo < prec:
            add(n * lo, n, -n * k)
            if n * hi < prec:
                add(n * hi, n, n * k)
            n += 1
        m += 1
    out = {}
    for exp, v in acc.items():
        out[exp] = v if rational else CycNum.from_power_counts(N, v)
    if e == 0:
        z = cyc_root_power(N, k)
        const = z / ((1 - z) * (1 - z))
        out[0] = out.get(0, 0) + const
    return out


def wp_diff(r: int, s: int, lam: int, Q: CuspClass, prec: int) -> LaurentSeries:
    """p(lam*r) - p(lam*s) composed with B(u,D), as a q_D-series to q_D^prec."""
    N = Q.N
    if (lam * r) % N == 0 or (lam * s) % N == 0:
        raise ValueError(f"invalid vector entry: {r} or {s} is 0 mod {N} after scaling by {lam}")
    tag = VarTag(N, Q.D, 1)
    a = _wp_terms(lam * r, Q, prec)
    b = _wp_terms(lam * s, Q, prec)
    for exp, c in b.items():
        a[exp] = a.get(exp, 0) - c
    return LaurentSeries.from_dict(a, tag, prec)


def _norm_entry(x: int, N: int) -> int:
    x %= N
    return min(x, N - x)


_cache_lock = threading.Lock()
_w_cache: dict[tuple, LaurentSeries] = {}


def clear_cache():
    with _cache_lock:
        _w_cache.clear()


def w_expansion(a, Q: CuspClass, prec: int) -> LaurentSeries:
    """W_a composed with B(u,D) as a q_D-series, known to q_D^prec."""
    N = Q.N
    a = WVector(*(_norm_entry(x, N) for x in a))
    a.validate(N)
    key = (N, a, Q.D, Q.u)
    with _cache_lock:
        hit = _w_cache.get(key)
    if hit is not None and hit.prec >= prec:
        return hit.truncate(prec)
    tag = VarTag(N, Q.D, 1)
    if (a.a1, a.a2) == (a.a3, a.a4):
        res = LaurentSeries.constant(1, tag, prec)
    else:
        target = w_order(a, Q, N)
        vn = min(braces_mu(a.a1, Q.D, N)[0], braces_mu(a.a2, Q.D, N)[0])
        vd = min(braces_mu(a.a3, Q.D, N)[0], braces_mu(a.a4, Q.D, N)[0])
        extra = 0
        while True:
            num = wp_diff(a.a1, a.a2, 1, Q, max(prec + vd, vn + 1) + extra)
            den = wp_diff(a.a3, a.a4, 1, Q, max(prec + 2 * vd - vn, vd + 1) + extra)
            if den.is_zero():
                raise ExpansionError(f"zero denominator for W_{a} at {Q}")
            res = num / den
            if res.prec >= prec:
                break
            # leading terms cancelled further than expected; widen
            extra += max(prec - res.prec, 1)
        res = res.truncate(prec)
        if res.val != target and not res.is_zero():
            raise ExpansionError(
                f"valuation of W_{a} at {Q} is {res.val}, order formula gives {target}"
            )
    with _cache_lock:
        old = _w_cache.get(key)
        if old is None or old.prec < res.prec:
            _w_cache[key] = res
    return res


@dataclass(frozen=True)
class TraceTerm:
    coeff: Fraction
    a: WVector
    b: WVector | None = None

    def vectors(self):
        return (self.a,) if self.b is None else (self.a, self.b)

    def text(self) -> str:
        t = f"T{self.a}"
        if self.b is not None:
            t += f"*{self.b}"
        return t


def _fmt_rat(c: Fraction) -> str:
    return str(c)


@dataclass
class ModFuncExpr:
    """alpha + sum(c_i * T(W_a_i [* W_b_i])) at level N."""

    level: int
    constant: Fraction = Fraction(0)
    terms: tuple = ()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        self.constant = Fraction(self.constant)
        merged: dict[tuple, Fraction] = {}
        order = []
        for t in self.terms:
            for v in t.vectors():
                v.validate(self.level)
            key = (t.a, t.b)
            if key not in merged:
                order.append(key)
                merged[key] = Fraction(0)
            merged[key] += Fraction(t.coeff)
        self.terms = tuple(
            TraceTerm(merged[k], k[0], k[1]) for k in order if merged[k] != 0
        )

    # -- algebra on expressions ---------------------------------------------
    def __add__(self, other):
        if isinstance(other, ModFuncExpr):
            if other.level != self.level:
                raise ValueError("level mismatch")
            return ModFuncExpr(self.level, self.constant + other.constant, self.terms + other.terms)
        return ModFuncExpr(self.level, self.constant + Fraction(other), self.terms)

    __radd__ = __add__

    def scale(self, c) -> "ModFuncExpr":
        c = Fraction(c)
        return ModFuncExpr(
            self.level,
            self.constant * c,
            tuple(TraceTerm(t.coeff * c, t.a, t.b) for t in self.terms),
        )

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ModFuncExpr) else -Fraction(other))

    def key(self):
        return (self.level, self.constant, self.terms)

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, ModFuncExpr) and self.key() == other.key()

    # -- text ------------------------------------------------------------------
    def to_text(self) -> str:
        parts = []
        if self.constant != 0 or not self.terms:
            parts.append(_fmt_rat(self.constant))
        for t in self.terms:
            c = t.coeff
            if c == 1:
                s = t.text()
            elif c == -1:
                s = "-" + t.text()
            else:
                s = f"{_fmt_rat(c)}*{t.text()}"
            parts.append(s)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __str__(self):
        return self.to_text()

    # -- expansions --------------------------------------------------------------
    def expansion(self, Q: CuspClass, prec: int) -> LaurentSeries:
        """Expansion at Q in the local parameter q_D^width, known to exponent prec."""
        with self._lock:
            hit = self._cache.get(Q)
        if hit is not None and hit.prec >= prec:
            return hit.truncate(prec)
        res = trace_expansion(self, Q, prec)
        with self._lock:
            old = self._cache.get(Q)
            if old is None or old.prec < res.prec:
                self._cache[Q] = res
        return res

    def order_bound(self, D: int) -> int:
        """Lower bound of the order at (1:D) in q_D units, the minimum of the per-term bounds."""
        bounds = [trace_order_bound(t.a, t.b, D, self.level) for t in self.terms]
        if self.constant != 0:
            bounds.append(0)
        return min(bounds) if bounds else 0


def _term_expansion(t: TraceTerm, Q: CuspClass, qprec: int) -> LaurentSeries:
    N = Q.N
    tag = VarTag(N, Q.D, 1)
    total = LaurentSeries.zero(tag, qprec)
    for lam in units_mod_pm(N):
        la = t.a.scaled(lam, N)
        if t.b is None:
            s = w_expansion(la, Q, qprec)
        else:
            lb = t.b.scaled(lam, N)
            va = w_order(la, Q, N)
            vb = w_order(lb, Q, N)
            # each factor to at least one term past its own valuation
            s = w_expansion(la, Q, max(qprec - vb, va + 1)) * w_expansion(lb, Q, max(qprec - va, vb + 1))
        total = total + s
    return total


def trace_expansion(e: ModFuncExpr, Q: CuspClass, prec: int) -> LaurentSeries:
    """alpha + sum c_i T(...) at Q, in the local parameter, to exponent ``prec``."""
    if Q.N != e.level:
        raise ValueError("cusp and expression have different levels")
    w = Q.width
    qprec = prec * w
    tag = VarTag(e.level, Q.D, 1)
    total = LaurentSeries.constant(e.constant, tag, qprec)
    for t in e.terms:
        total = total + _term_expansion(t, Q, qprec).scale(t.coeff)
    try:
        res = total.rebase(w)
    except SeriesError as exc:
        raise ExpansionError(f"expansion of {e} at {Q} is not supported on the width lattice") from exc
    if Q.D == 1:
        try:
            res = res.to_rational()
        except SeriesError as exc:
            raise ExpansionError(f"expansion of {e} at <1/1> has non-rational coefficients") from exc
    elif res.is_rational():
        res = res.to_rational()
    return res


# -- expression grammar -----------------------------------------------------------

_VEC = r"\[\s*-?\d+\s*,\s*-?\d+\s*,\s*-?\d+\s*,\s*-?\d+\s*\]"
_TOKEN = re.compile(
    r"\s*(?:(?P<trace>T?\s*(?P<a>" + _VEC + r")(?:\s*\*\s*(?P<b>" + _VEC + r"))?)"
    r"|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*]))"
)


def _vec(text: str, N: int) -> WVector:
    nums = [int(x) for x in text.strip("[] ").split(",")]
    return WVector.of(nums, N)


def parse_expr(text: str, N: int) -> ModFuncExpr:
    """Parse ``-3 + T[5,1,2,1]``, ``2*T[4,1,3,1]*[5,1,2,1]``, ``1/2*[5,1,2,1]``...

    The leading ``T`` of a trace is optional, matching the table notation.
    """
    pos = 0
    s = text.strip()
    if not s:
        raise ValueError("empty expression")
    const = Fraction(0)
    terms = []
    sign = 1
    coeff = None
    expect_operand = True
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse expression at {s[pos:]!r}")
        pos = m.end()
        if m.group("op"):
            op = m.group("op")
            if op == "*":
                if coeff is None or expect_operand:
                    raise ValueError(f"misplaced '*' in {text!r}")
                expect_operand = True
                continue
            if not expect_operand or coeff is not None:
                if coeff is not None:
                    const += sign * coeff
                    coeff = None
                sign = 1 if op == "+" else -1
            else:
                sign = sign * (1 if op == "+" else -1)
            expect_operand = True
            continue
        if m.group("num"):
            if coeff is not None:
                raise ValueError(f"two numbers in a row in {text!r}")
            coeff = Fraction(m.group("num"))
            expect_operand = False
            continue
        a = _vec(m.group("a"), N)
        b = _vec(m.group("b"), N) if m.group("b") else None
        if b is not None and b.a1 == b.a3 and b.a2 == b.a4:
            b = None
        c = Fraction(1) if coeff is None else coeff
        terms.append(TraceTerm(sign * c, a, b))
        coeff = None
        sign = 1
        expect_operand = False
    if coeff is not None:
        const += sign * coeff
    elif expect_operand:
        raise ValueError(f"expression ends with an operator: {text!r}")
    return ModFuncExpr(N, const, tuple(terms))


def all_expansions(e: ModFuncExpr, prec_at: dict) -> dict:
    """Expansions at every cusp class; ``prec_at`` maps CuspClass -> precision."""
    return {Q: e.expansion(Q, prec_at[Q]) for Q in cusps_gamma0(e.level)}
