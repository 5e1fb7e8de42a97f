"""Exact coefficient rings: rationals and the cyclotomic field Q(zeta_N).

Rationals are plain ``int`` / ``fractions.Fraction`` values; integer-valued
coefficients are kept as ``int`` so the hot series loops stay on machine
integers.  Elements of Q(zeta_N) are :class:`CycNum` instances, stored as an
integer numerator vector over a common positive denominator and reduced
modulo the N-th cyclotomic polynomial, so equality is structural.
"""
from __future__ import annotations

import re
import threading
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

__all__ = [
    "CycNum",
    "cyclotomic_poly",
    "cyc_root_power",
    "euler_phi",
    "qdiv",
    "as_fraction",
    "is_rational_scalar",
]


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def is_rational_scalar(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def as_fraction(x) -> Fraction:
    if isinstance(x, CycNum):
        return x.to_rational()
    return Fraction(x)


def qdiv(a, b):
    """Exact quotient that stays an ``int`` whenever it can."""
    if isinstance(a, int) and isinstance(b, int):
        if b == 1:
            return a
        if b == -1:
            return -a
        q, r = divmod(a, b)
        return q if r == 0 else Fraction(a, b)
    if isinstance(a, CycNum) or isinstance(b, CycNum):
        return a * (b.inverse() if isinstance(b, CycNum) else Fraction(1) / b)
    r = Fraction(a) / Fraction(b)
    return r.numerator if r.denominator == 1 else r


# -- integer polynomial helpers (coefficient lists, lowest degree first) -----

def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_exact_div(num, den):
    """Exact division of integer polynomials; ``den`` must be monic."""
    num = list(num)
    dn = len(den) - 1
    if den[-1] != 1:
        raise ValueError("divisor must be monic")
    quot = [0] * (len(num) - dn)
    for k in range(len(num) - 1, dn - 1, -1):
        c = num[k]
        if c:
            quot[k - dn] = c
            for j, d in enumerate(den):
                num[k - dn + j] -= c * d
    if any(num[:dn]):
        raise ArithmeticError("polynomial division is not exact")
    return quot


_phi_lock = threading.Lock()
_phi_memo: dict[int, tuple[int, ...]] = {}


def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first.

    Computed by dividing x^n - 1 by Phi_d for the proper divisors d of n.
    """
    if n < 1:
        raise ValueError("cyclotomic_poly needs n >= 1")
    with _phi_lock:
        hit = _phi_memo.get(n)
    if hit is not None:
        return hit
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _poly_exact_div(num, cyclotomic_poly(d))
    result = tuple(num)
    with _phi_lock:
        _phi_memo.setdefault(n, result)
    return result


class _Level:
    """Per-level reduction data for Q(zeta_N)."""

    __slots__ = ("n", "phi", "poly", "red", "powers")

    def __init__(self, n: int):
        self.n = n
        self.poly = cyclotomic_poly(n)
        self.phi = len(self.poly) - 1
        phi = self.phi
        # x^k mod Phi_n for phi <= k <= max(n - 1, 2*phi - 2), stored sparsely
        top = max(n - 1, 2 * phi - 2)
        cur = [0] * phi
        rows = []
        lo = [-c for c in self.poly[:phi]]
        cur = lo[:]  # x^phi
        for _ in range(phi, top + 1):
            rows.append(tuple((j, c) for j, c in enumerate(cur) if c))
            lead = cur[-1]
            cur = [0] + cur[:-1]
            if lead:
                for j in range(phi):
                    cur[j] += lead * lo[j]
        self.red = rows
        self.powers = None

    def reduce(self, vec):
        """Reduce an integer list (any length) modulo Phi_n, in place style."""
        phi = self.phi
        if len(vec) <= phi:
            return list(vec) + [0] * (phi - len(vec))
        if len(vec) > self.n:
            # x^n = 1 modulo Phi_n
            folded = [0] * self.n
            for k, c in enumerate(vec):
                folded[k % self.n] += c
            vec = folded
            if len(vec) <= phi:
                return vec + [0] * (phi - len(vec))
        out = list(vec[:phi])
        red = self.red
        for k in range(phi, len(vec)):
            c = vec[k]
            if c:
                for j, r in red[k - phi]:
                    out[j] += c * r
        return out


_level_lock = threading.Lock()
_levels: dict[int, _Level] = {}


def _level(n: int) -> _Level:
    lv = _levels.get(n)
    if lv is None:
        with _level_lock:
            lv = _levels.get(n)
            if lv is None:
                lv = _levels[n] = _Level(n)
    return lv


def _normalize(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = gcd(den, *nums)
    if g > 1:
        nums = [x // g for x in nums]
        den //= g
    if not any(nums):
        den = 1
    return tuple(nums), den


class CycNum:
    """An element of Q(zeta_N), zeta_N = exp(2*pi*i/N).

    ``coeffs[k]`` is the rational coefficient of zeta^k in the representative
    of degree < phi(N).
    """

    __slots__ = ("level", "_num", "_den", "_hash")

    def __init__(self, level: int, coeffs=(), *, _raw=None):
        self.level = level
        self._hash = None
        if _raw is not None:
            self._num, self._den = _raw
            return
        lv = _level(level)
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in fr]
        self._num, self._den = _normalize(lv.reduce(ints), den)

    # -- constructors --------------------------------------------------
    @classmethod
    def _from_ints(cls, level: int, nums, den: int = 1) -> "CycNum":
        return cls(level, _raw=_normalize(list(nums), den))

    @classmethod
    def from_rational(cls, level: int, x) -> "CycNum":
        x = Fraction(x)
        phi = _level(level).phi
        return cls._from_ints(level, [x.numerator] + [0] * (phi - 1), x.denominator)

    @classmethod
    def from_power_counts(cls, level: int, counts) -> "CycNum":
        """Build sum(counts[j] * zeta^j) from an integer list of length <= N."""
        return cls._from_ints(level, _level(level).reduce(counts))

    # -- accessors -----------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self._den) for x in self._num)

    @property
    def phi(self) -> int:
        return len(self._num)

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self._num[0], self._den)

    def coordinates(self) -> list[Fraction]:
        return list(self.coeffs)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycNum):
            if other.level != self.level:
                raise ValueError("cyclotomic numbers of different levels")
            return other
        if is_rational_scalar(other):
            return CycNum.from_rational(self.level, other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            nums = list(self._num)
            nums[0] += other * self._den
            return CycNum._from_ints(self.level, nums, self._den)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d1, d2 = self._den, o._den
        if d1 == d2:
            nums = [a + b for a, b in zip(self._num, o._num)]
            return CycNum._from_ints(self.level, nums, d1)
        nums = [a * d2 + b * d1 for a, b in zip(self._num, o._num)]
        return CycNum._from_ints(self.level, nums, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.level, _raw=(tuple(-x for x in self._num), self._den))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return CycNum._from_ints(self.level, [x * other for x in self._num], self._den)
        if isinstance(other, Fraction):
            return CycNum._from_ints(
                self.level,
                [x * other.numerator for x in self._num],
                self._den * other.denominator,
            )
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self._num, o._num
        phi = len(a)
        prod = [0] * (2 * phi - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        lv = _level(self.level)
        return CycNum._from_ints(self.level, lv.reduce(prod), self._den * o._den)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        if self.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        lv = _level(self.level)
        s = _poly_inverse_mod([Fraction(x, self._den) for x in self._num], list(lv.poly))
        return CycNum(self.level, s)

    def __truediv__(self, other):
        if isinstance(other, CycNum):
            return self * other.inverse()
        if is_rational_scalar(other):
            if other == 0:
                raise ZeroDivisionError("division by zero in cyclotomic field")
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CycNum.from_rational(self.level, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.level == other.level and self._num == other._num and self._den == other._den
        if is_rational_scalar(other):
            return self.is_rational() and Fraction(self._num[0], self._den) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._num[0], self._den))
            else:
                self._hash = hash((self.level, self._num, self._den))
        return self._hash

    def conjugate(self) -> "CycNum":
        """Complex conjugate (zeta -> zeta^-1)."""
        n = self.level
        counts = [0] * n
        for k, x in enumerate(self._num):
            counts[(-k) % n] += x
        return CycNum._from_ints(n, _level(n).reduce(counts), self._den)

    def galois(self, t: int) -> "CycNum":
        """Image under zeta -> zeta^t, gcd(t, N) = 1."""
        n = self.level
        counts = [0] * n
        for k, x in enumerate(self._num):
            counts[(k * t) % n] += x
        return CycNum._from_ints(n, _level(n).reduce(counts), self._den)

    def to_complex(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.level)
        return sum(float(c) * z ** k for k, c in enumerate(self.coeffs))

    # -- text ------------------------------------------------------------
    def to_text(self, symbol: str = "z") -> str:
        terms = []
        for k in range(len(self._num) - 1, -1, -1):
            c = Fraction(self._num[k], self._den)
            if c:
                terms.append(_term_text(c, k, symbol))
        return _join_terms(terms)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"CycNum({self.level}, {self.to_text()!r})"

    @classmethod
    def parse(cls, level: int, text: str, symbol: str = "z") -> "CycNum":
        counts: dict[int, Fraction] = {}
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty cyclotomic literal")
        pat = re.compile(
            r"([+-]?)(\d+(?:/\d+)?)?(?:\*?(" + re.escape(symbol) + r")(?:\^(\d+))?)?"
        )
        pos = 0
        while pos < len(s):
            m = pat.match(s, pos)
            if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
                raise ValueError(f"cannot parse cyclotomic literal {text!r}")
            sign = -1 if m.group(1) == "-" else 1
            coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            k = 0
            if m.group(3):
                k = int(m.group(4)) if m.group(4) else 1
            counts[k] = counts.get(k, 0) + sign * coef
            pos = m.end()
        vec = [Fraction(0)] * (max(counts) + 1)
        for k, c in counts.items():
            vec[k] += c
        den = 1
        for c in vec:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in vec]
        return cls._from_ints(level, _level(level).reduce(ints), den)

    def minpoly(self) -> list[Fraction]:
        """Monic minimal polynomial over Q, lowest degree first."""
        from .linalg import nullspace

        powers = [CycNum.from_rational(self.level, 1)]
        while True:
            powers.append(powers[-1] * self)
            cols = [p.coordinates() for p in powers]
            matrix = [[cols[j][i] for j in range(len(cols))] for i in range(self.phi)]
            kernel = nullspace(matrix)
            if kernel:
                v = kernel[0]
                lead = v[-1]
                return [c / lead for c in v]


def _term_text(c: Fraction, k: int, symbol: str) -> str:
    mon = "" if k == 0 else (symbol if k == 1 else f"{symbol}^{k}")
    if not mon:
        return str(c)
    if c == 1:
        return mon
    if c == -1:
        return "-" + mon
    return f"{c}*{mon}"


def _join_terms(terms: list[str]) -> str:
    if not terms:
        return "0"
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _poly_inverse_mod(a: list[Fraction], m: list[int]) -> list[Fraction]:
    """Inverse of a modulo m in Q[x] by the extended Euclidean algorithm."""
    r0, r1 = _trim([Fraction(c) for c in m]), _trim([Fraction(c) for c in a])
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _qdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    c = r0[0]
    return [x / c for x in s0]


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim([Fraction(x) for x in out])


def _qdivmod(a, b):
    a = list(a)
    db = len(b) - 1
    q = [Fraction(0)] * max(len(a) - db, 1)
    lead = b[-1]
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] / lead
        if c:
            q[k - db] = c
            for j, d in enumerate(b):
                a[k - db + j] -= c * d
    return _trim(q), _trim(a[:db] if db else [])


@lru_cache(maxsize=None)
def cyc_root_power(level: int, k: int) -> CycNum:
    """zeta_N^k in reduced form."""
    counts = [0] * level
    counts[k % level] = 1
    return CycNum.from_power_counts(level, counts)
