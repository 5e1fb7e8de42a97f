"""Cusp combinatorics for Gamma_1(N) and Gamma_0(N), orders of W_a, genus."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple

from .exact import euler_phi

__all__ = [
    "UnsupportedLevel",
    "WVector",
    "Gamma1Cusp",
    "CuspClass",
    "divisors",
    "braces_mu",
    "cusps_gamma1",
    "cusps_gamma0",
    "cusp_class_of",
    "w_order",
    "trace_order_bound",
    "genus0",
    "gamma1_cusp_count",
    "units_mod_pm",
]

MIN_LEVEL = 5


class UnsupportedLevel(ValueError):
    pass


def _check_level(N: int):
    if N < MIN_LEVEL:
        raise UnsupportedLevel(f"level {N} is not supported (need N >= {MIN_LEVEL})")


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


class WVector(NamedTuple):
    a1: int
    a2: int
    a3: int
    a4: int

    @classmethod
    def of(cls, seq, N: int | None = None) -> "WVector":
        vals = [int(x) for x in seq]
        if len(vals) != 4:
            raise ValueError(f"a W-vector needs 4 entries, got {len(vals)}")
        if N is not None:
            vals = [x % N for x in vals]
        v = cls(*vals)
        if N is not None:
            v.validate(N)
        return v

    def validate(self, N: int) -> None:
        a = [x % N for x in self]
        if any(x == 0 for x in a):
            raise ValueError(f"invalid W-vector {list(self)}: entries must be nonzero mod {N}")
        if a[0] in (a[1], (-a[1]) % N) or a[2] in (a[3], (-a[3]) % N):
            raise ValueError(f"invalid W-vector {list(self)}: a1 = +-a2 or a3 = +-a4 mod {N}")

    def is_valid(self, N: int) -> bool:
        try:
            self.validate(N)
        except ValueError:
            return False
        return True

    def scaled(self, lam: int, N: int) -> "WVector":
        return WVector(*((lam * x) % N for x in self))

    def __str__(self):
        return "[" + ",".join(str(x) for x in self) + "]"


class Gamma1Cusp(NamedTuple):
    u: int
    t: int
    D: int


@dataclass(frozen=True, order=True)
class CuspClass:
    """Gamma_0(N) cusp <u/D>; width is the exponent of the local parameter in q_D."""

    D: int
    u: int
    N: int
    width: int
    d: int

    @property
    def c(self) -> int:
        return (self.u * self.d - 1) // self.D

    def label(self) -> str:
        return f"<{self.u}/{self.D}>"

    def as_gamma1(self) -> Gamma1Cusp:
        return Gamma1Cusp(self.u, self.D, self.D)

    def to_json_obj(self) -> dict:
        return {"u": self.u, "D": self.D, "width": self.width, "d": self.d}

    def __str__(self):
        return self.label()


def braces_mu(n: int, D: int, N: int) -> tuple[int, int]:
    """({n}_D, mu_D(n)): 0 <= {n} <= N/(2D) and n = mu*{n} mod N/D."""
    if N % D:
        raise ValueError(f"{D} does not divide {N}")
    M = N // D
    r = n % M
    if 2 * r <= M:
        return r, 1
    return M - r, -1


def _smallest_inverse(u: int, D: int) -> int:
    if D == 1:
        return 0
    return pow(u, -1, D)


def cusps_gamma1(N: int) -> list[Gamma1Cusp]:
    """Inequivalent cusps of Gamma_1(N), ordered by (t, u).

    For t in {N/2, N} the range u <= D/2 is read as u <= floor(D/2), which
    matches the classical cusp count.
    """
    _check_level(N)
    out = []
    for t in range(1, N + 1):
        if 2 * t < N:
            D = gcd(t, N)
            umax = D
        elif 2 * t == N or t == N:
            D = gcd(t, N)
            umax = D // 2
        else:
            continue
        for u in range(1, umax + 1):
            if gcd(u, D) == 1:
                out.append(Gamma1Cusp(u, t, D))
    return out


def gamma1_cusp_count(N: int) -> int:
    """Classical count: (1/2) sum_{d|N} phi(d) phi(N/d) for N >= 5."""
    return sum(euler_phi(d) * euler_phi(N // d) for d in divisors(N)) // 2


def _class_reps(N: int, D: int) -> list[int]:
    w = gcd(D, N // D)
    reps = []
    for r in range(w):
        if gcd(r, w) != 1:
            continue
        v = r if r else w
        while gcd(v, D) != 1:
            v += w
        reps.append(v)
    return sorted(reps)


def cusps_gamma0(N: int) -> list[CuspClass]:
    """One representative <v/D> per Gamma_0(N) cusp, ordered by (D, v)."""
    _check_level(N)
    out = []
    for D in divisors(N):
        w = gcd(D, N // D)
        for v in _class_reps(N, D):
            out.append(CuspClass(D=D, u=v, N=N, width=w, d=_smallest_inverse(v, D)))
    return out


def cusp_class_of(u: int, t: int, N: int) -> CuspClass:
    """Gamma_0(N) class of the Gamma_1(N) cusp (u:t)."""
    D = gcd(t, N)
    if gcd(u, D) != 1:
        raise ValueError(f"invalid cusp ({u}:{t}) at level {N}")
    w = gcd(D, N // D)
    v = (t // D * u) % w
    for Q in cusps_gamma0(N):
        if Q.D == D and (Q.u - v) % w == 0:
            return Q
    raise ValueError(f"invalid cusp ({u}:{t}) at level {N}")


def w_order(a, Q, N: int) -> int:
    """Order of W_a at the Gamma_1 cusp Q = (u:t), in q_D units."""
    if isinstance(Q, CuspClass):
        t = Q.D
    else:
        t = Q[1]
    D = gcd(t, N)
    tp = t // D
    b = [braces_mu(x * tp, D, N)[0] for x in a]
    return min(b[0], b[1]) - min(b[2], b[3])


def units_mod_pm(N: int) -> list[int]:
    """Representatives of (Z/N)^x / {+-1}, the lambdas of the trace."""
    return [k for k in range(1, N // 2 + 1) if gcd(k, N) == 1]


def trace_order_bound(a, b, D: int, N: int) -> int:
    """Lower bound for the order of T(W_a W_b) at (1:D), in q_D units.

    ``b`` may be None for a single trace.
    """
    M = N // D
    smax = max(1, M // 2)
    best = None
    for s in range(1, smax + 1):
        if gcd(s, M) != 1:
            continue
        sa = [s * x for x in a]
        val = w_order(sa, (1, D), N)
        if b is not None:
            val += w_order([s * x for x in b], (1, D), N)
        best = val if best is None else min(best, val)
    return best


def genus0(N: int) -> int:
    """Genus of X_0(N) from the index, elliptic points and cusps."""
    if N < 1:
        raise ValueError("level must be positive")
    primes = []
    m, p = N, 2
    while p * p <= m:
        if m % p == 0:
            primes.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        primes.append(m)
    mu = N
    for p in primes:
        mu = mu * (p + 1) // p

    if N % 4 == 0:
        nu2 = 0
    else:
        nu2 = 1
        for p in primes:
            if p == 2:
                continue
            nu2 *= 1 + (-1 if p % 4 == 3 else 1)
    if N % 9 == 0:
        nu3 = 0
    else:
        nu3 = 1
        for p in primes:
            if p == 3:
                continue
            nu3 *= 1 + (-1 if p % 3 == 2 else 1)
    cusps = sum(euler_phi(gcd(d, N // d)) for d in divisors(N))
    g = 1 + Fraction(mu, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    if g.denominator != 1:
        raise ArithmeticError(f"non-integral genus for N={N}")
    return int(g)
