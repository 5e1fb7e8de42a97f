"""Truncated Laurent series in a cusp-local variable.

A series is ``sum(coeffs[i] * t^(val + i)) + O(t^prec)`` where ``t`` is
``q_D^step`` for the tag ``(N, D, step)`` and q_D = exp(2 pi i tau D / N).
Coefficients are rational (``int``/``Fraction``) or :class:`CycNum`.

Products go through Kronecker substitution: the integer numerators are
packed into one big integer, multiplied by CPython's bigint routine and
unpacked again, which is much faster than a Python-level double loop.
"""
from __future__ import annotations

import json
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple

from .exact import CycNum, _level, is_rational_scalar, qdiv

__all__ = ["VarTag", "LaurentSeries", "SeriesError"]


class SeriesError(ValueError):
    pass


class VarTag(NamedTuple):
    """Identifies the variable q_D^step at level N."""

    N: int
    D: int
    step: int = 1

    @property
    def name(self) -> str:
        base = f"q_{self.D}" if self.D != 1 else "q"
        return base if self.step == 1 else f"{base}^{self.step}"


# -- Kronecker substitution -------------------------------------------------

def _pack(vals: list[int], kb: int) -> int:
    half = 1 << (8 * kb - 1)
    buf = b"".join((v + half).to_bytes(kb, "little") for v in vals)
    return int.from_bytes(buf, "little") - _bias(len(vals), kb)


_bias_memo: dict[tuple[int, int], int] = {}


def _bias(n: int, kb: int) -> int:
    key = (n, kb)
    b = _bias_memo.get(key)
    if b is None:
        b = int.from_bytes((b"\x00" * (kb - 1) + b"\x80") * n, "little")
        if n * kb < 1 << 16:
            _bias_memo[key] = b
    return b


def _unpack(x: int, n: int, kb: int) -> list[int]:
    nbits = 8 * kb * n
    y = (x + _bias(n, kb)) & ((1 << nbits) - 1)
    buf = y.to_bytes(kb * n, "little")
    half = 1 << (8 * kb - 1)
    return [int.from_bytes(buf[i : i + kb], "little") - half for i in range(0, kb * n, kb)]


def int_convolve(a: list[int], b: list[int], n_out: int) -> list[int]:
    """First ``n_out`` coefficients of the product of two integer polynomials."""
    if not a or not b or n_out <= 0:
        return [0] * max(n_out, 0)
    a = a[:n_out]
    b = b[:n_out]
    if len(a) * len(b) <= 64:
        out = [0] * n_out
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n_out - i)):
                    out[i + j] += x * b[j]
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if ma == 0 or mb == 0:
        return [0] * n_out
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    kb = (bits + 7) // 8
    prod = _pack(a, kb) * _pack(b, kb)
    return _unpack(prod, n_out, kb)


# -- coefficient vector conversions ------------------------------------------

def _rational_ints(coeffs) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        if isinstance(c, Fraction) and c.denominator != 1:
            den = lcm(den, c.denominator)
    if den == 1:
        return [int(c) for c in coeffs], 1
    return [int(c * den) for c in coeffs], den


def _cyc_ints(coeffs, phi: int) -> tuple[list[list[int]], int]:
    den = 1
    for c in coeffs:
        if isinstance(c, CycNum):
            den = lcm(den, c._den)
        elif isinstance(c, Fraction):
            den = lcm(den, c.denominator)
    rows = []
    for c in coeffs:
        if isinstance(c, CycNum):
            f = den // c._den
            rows.append([x * f for x in c._num] if f != 1 else list(c._num))
        else:
            v = [0] * phi
            v[0] = int(Fraction(c) * den)
            rows.append(v)
    return rows, den


def _is_cyc_list(coeffs) -> int | None:
    for c in coeffs:
        if isinstance(c, CycNum):
            return c.level
    return None


def _from_rational_ints(ints: list[int], den: int) -> list:
    if den == 1:
        return ints
    return [qdiv(x, den) for x in ints]


def _cyc_convolve(a, b, level: int, n_out: int) -> list:
    lv = _level(level)
    phi = lv.phi
    ra, da = _cyc_ints(a[:n_out], phi)
    rb, db = _cyc_ints(b[:n_out], phi)
    stride = 2 * phi - 1
    fa = [0] * (len(ra) * stride)
    for i, r in enumerate(ra):
        fa[i * stride : i * stride + phi] = r
    fb = [0] * (len(rb) * stride)
    for i, r in enumerate(rb):
        fb[i * stride : i * stride + phi] = r
    flat = int_convolve(fa, fb, n_out * stride)
    den = da * db
    out = []
    for i in range(n_out):
        slot = flat[i * stride : (i + 1) * stride]
        out.append(CycNum._from_ints(level, lv.reduce(slot), den))
    return out


def _convolve(a: list, b: list, n_out: int) -> list:
    lev = _is_cyc_list(a) or _is_cyc_list(b)
    if lev:
        return _cyc_convolve(a, b, lev, n_out)
    ia, da = _rational_ints(a[:n_out])
    ib, db = _rational_ints(b[:n_out])
    return _from_rational_ints(int_convolve(ia, ib, n_out), da * db)


def _is_zero(c) -> bool:
    return c == 0 if not isinstance(c, CycNum) else c.is_zero()


def _coef_text(c) -> str:
    if isinstance(c, CycNum):
        if c.is_rational():
            return str(c.to_rational())
        return c.to_text()
    return str(c)


class LaurentSeries:
    """Immutable truncated Laurent series.

    ``coeffs[0]`` is nonzero unless the series is zero to its precision, in
    which case ``coeffs`` is empty and ``val == prec``.
    """

    __slots__ = ("tag", "val", "prec", "coeffs")

    def __init__(self, tag: VarTag, val: int, coeffs, prec: int):
        coeffs = list(coeffs)[: max(prec - val, 0)]
        i = 0
        while i < len(coeffs) and _is_zero(coeffs[i]):
            i += 1
        if i == len(coeffs):
            self.tag, self.val, self.prec, self.coeffs = tag, prec, prec, ()
            return
        coeffs = coeffs[i:]
        val += i
        # canonical int for integral rationals
        self.coeffs = tuple(
            c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c for c in coeffs
        )
        self.tag, self.val, self.prec = tag, val, prec

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, tag: VarTag, prec: int) -> "LaurentSeries":
        return cls(tag, prec, (), prec)

    @classmethod
    def constant(cls, c, tag: VarTag, prec: int) -> "LaurentSeries":
        return cls(tag, 0, [c], prec)

    @classmethod
    def monomial(cls, c, e: int, tag: VarTag, prec: int) -> "LaurentSeries":
        return cls(tag, e, [c], prec)

    @classmethod
    def from_dict(cls, terms: dict, tag: VarTag, prec: int) -> "LaurentSeries":
        terms = {e: c for e, c in terms.items() if e < prec and not _is_zero(c)}
        if not terms:
            return cls.zero(tag, prec)
        v = min(terms)
        return cls(tag, v, [terms.get(e, 0) for e in range(v, prec)], prec)

    # -- accessors ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int:
        return self.val

    def leading_coefficient(self):
        if not self.coeffs:
            raise SeriesError("zero series has no leading coefficient")
        return self.coeffs[0]

    def __getitem__(self, e: int):
        if e >= self.prec:
            raise IndexError(f"coefficient of exponent {e} beyond precision {self.prec}")
        i = e - self.val
        if i < 0 or i >= len(self.coeffs):
            return 0
        return self.coeffs[i]

    coefficient = __getitem__

    def terms(self):
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                yield self.val + i, c

    def dense(self, lo: int, hi: int) -> list:
        """Coefficients for exponents lo..hi-1 (hi <= prec)."""
        if hi > self.prec:
            raise SeriesError(f"need precision {hi}, have {self.prec}")
        return [self[e] if e >= self.val else 0 for e in range(lo, hi)]

    def is_rational(self) -> bool:
        return all(not isinstance(c, CycNum) or c.is_rational() for c in self.coeffs)

    def to_rational(self) -> "LaurentSeries":
        if not self.is_rational():
            raise SeriesError("series has non-rational coefficients")
        cs = [c.to_rational() if isinstance(c, CycNum) else c for c in self.coeffs]
        return LaurentSeries(self.tag, self.val, cs, self.prec)

    # -- arithmetic -----------------------------------------------------------
    def _check(self, other: "LaurentSeries"):
        if self.tag != other.tag:
            raise SeriesError(f"variable tag mismatch: {self.tag} vs {other.tag}")

    def _coerce(self, other):
        if isinstance(other, LaurentSeries):
            self._check(other)
            return other
        if is_rational_scalar(other) or isinstance(other, CycNum):
            return LaurentSeries.constant(other, self.tag, max(self.prec, 1))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        prec = min(self.prec, o.prec)
        if self.is_zero():
            return o.truncate(prec)
        if o.is_zero():
            return self.truncate(prec)
        v = min(self.val, o.val)
        n = prec - v
        if n <= 0:
            return LaurentSeries.zero(self.tag, prec)
        out = [0] * n
        for i, c in enumerate(self.coeffs[: max(prec - self.val, 0)]):
            out[self.val - v + i] = c
        for i, c in enumerate(o.coeffs[: max(prec - o.val, 0)]):
            j = o.val - v + i
            out[j] = out[j] + c
        return LaurentSeries(self.tag, v, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.tag, self.val, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentSeries":
        if _is_zero(c):
            return LaurentSeries.zero(self.tag, self.prec)
        if isinstance(c, CycNum) and c.is_rational():
            c = c.to_rational()
        return LaurentSeries(self.tag, self.val, [x * c for x in self.coeffs], self.prec)

    def __mul__(self, other):
        if is_rational_scalar(other) or isinstance(other, CycNum):
            return self.scale(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        self._check(other)
        prec = min(self.val + other.prec, other.val + self.prec)
        v = self.val + other.val
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(self.tag, prec)
        n = prec - v
        if n <= 0:
            return LaurentSeries.zero(self.tag, prec)
        return LaurentSeries(self.tag, v, _convolve(list(self.coeffs), list(other.coeffs), n), prec)

    def __rmul__(self, other):
        if is_rational_scalar(other) or isinstance(other, CycNum):
            return self.scale(other)
        return NotImplemented

    def inverse(self) -> "LaurentSeries":
        """Multiplicative inverse, known to relative precision prec - val."""
        if self.is_zero():
            raise SeriesError("cannot invert a zero series")
        n = self.prec - self.val
        lead = self.coeffs[0]
        inv_lead = lead.inverse() if isinstance(lead, CycNum) else qdiv(1, lead)
        f = list(self.coeffs)
        g = [inv_lead]
        k = 1
        while k < n:
            k2 = min(2 * k, n)
            fg = _convolve(f[:k2], g, k2)
            # g <- g * (2 - f g)
            e = [-x for x in fg]
            e[0] = e[0] + 2
            g = _convolve(g, e, k2)
            k = k2
        return LaurentSeries(self.tag, -self.val, g, n - self.val)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * other.inverse()
        if is_rational_scalar(other):
            if other == 0:
                raise ZeroDivisionError("series division by zero")
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, CycNum):
            return self.scale(other.inverse())
        return NotImplemented

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int) -> "LaurentSeries":
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return LaurentSeries.constant(1, self.tag, max(self.prec - self.val, 1))
        result, base = None, self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by t^k."""
        return LaurentSeries(self.tag, self.val + k, self.coeffs, self.prec + k)

    def truncate(self, prec: int) -> "LaurentSeries":
        if prec > self.prec:
            raise SeriesError(f"cannot raise precision from {self.prec} to {prec}")
        if prec == self.prec:
            return self
        return LaurentSeries(self.tag, self.val, self.coeffs, prec)

    def rebase(self, e: int) -> "LaurentSeries":
        """Regroup as a series in t^e; every nonzero exponent must be divisible by e."""
        if e == 1:
            return self
        for x, c in self.terms():
            if x % e:
                raise SeriesError("series not supported on q_D^e lattice")
        tag = VarTag(self.tag.N, self.tag.D, self.tag.step * e)
        prec = -((-self.prec) // e)  # ceil
        if self.is_zero():
            return LaurentSeries.zero(tag, prec)
        # exponents in [val, prec) divisible by e map to [val/e, ceil(prec/e))
        terms = {x // e: c for x, c in self.terms()}
        return LaurentSeries.from_dict(terms, tag, prec)

    def substitute_power(self, k: int, tag: VarTag) -> "LaurentSeries":
        """Replace t by s^k, where s is the variable of ``tag``."""
        terms = {x * k: c for x, c in self.terms()}
        return LaurentSeries.from_dict(terms, tag, self.prec * k)

    def map_coefficients(self, fn) -> "LaurentSeries":
        return LaurentSeries(self.tag, self.val, [fn(c) for c in self.coeffs], self.prec)

    # -- comparison ------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.prec == other.prec
            and self.val == other.val
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.tag, self.val, self.prec, self.coeffs))

    def agrees_with(self, other: "LaurentSeries") -> bool:
        """Equality up to the smaller of the two precisions."""
        self._check(other)
        return (self - other).is_zero()

    # -- text / JSON -------------------------------------------------------------
    def to_text(self, max_terms: int | None = None) -> str:
        var = self.tag.name
        parts = []
        for x, c in self.terms():
            if max_terms is not None and len(parts) >= max_terms:
                break
            cs = _coef_text(c)
            if x == 0:
                mon = ""
            elif x == 1:
                mon = var
            else:
                mon = f"{var}^{x}" if self.tag.step == 1 else f"({var})^{x}"
            if not mon:
                parts.append(cs if (" " not in cs) else f"({cs})")
            elif cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append("-" + mon)
            elif " " in cs:
                parts.append(f"({cs})*{mon}")
            else:
                parts.append(f"{cs}*{mon}")
        out = parts[0] if parts else "0"
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return f"{out} + O({self.tag.name}^{self.prec})" if self.tag.step == 1 else f"{out} + O(({self.tag.name})^{self.prec})"

    def __repr__(self):
        return f"LaurentSeries({self.to_text(12)})"

    def to_json_obj(self) -> dict:
        lev = _is_cyc_list(self.coeffs)
        obj = {
            "var": "q_D",
            "N": self.tag.N,
            "D": self.tag.D,
            "step": self.tag.step,
            "val": self.val,
            "prec": self.prec,
            "coeffs": [_coef_text(c) for c in self.coeffs],
        }
        if lev:
            obj["z"] = f"exp(2*pi*i/{lev})"
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LaurentSeries":
        tag = VarTag(int(obj["N"]), int(obj["D"]), int(obj.get("step", 1)))
        lev = None
        if "z" in obj:
            lev = int(obj["z"].split("/")[1].rstrip(")"))
        coeffs = []
        for s in obj["coeffs"]:
            if lev and "z" in s:
                coeffs.append(CycNum.parse(lev, s))
            else:
                coeffs.append(Fraction(s))
        return cls(tag, int(obj["val"]), coeffs, int(obj["prec"]))

    @classmethod
    def from_json(cls, text: str) -> "LaurentSeries":
        return cls.from_json_obj(json.loads(text))
