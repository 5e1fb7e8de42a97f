"""Exact linear algebra over Q.

Rows are cleared to primitive integer vectors and eliminated fraction-free
(each update is an integer cross-multiplication followed by a row gcd), so
no Fraction arithmetic happens inside the O(n^3) loop.  Systems whose
coefficients live in Q(zeta_N) but whose unknowns are rational are expanded
coordinate-wise by :func:`split_cyclotomic`.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

from .exact import CycNum

__all__ = [
    "LinearSystemError",
    "Echelon",
    "rank",
    "rref",
    "nullspace",
    "solve",
    "det",
    "split_cyclotomic",
]


class LinearSystemError(ArithmeticError):
    """Raised when a system is inconsistent or its solution is not unique."""

    def __init__(self, kind: str, message: str, kernel_dim: int = 0):
        super().__init__(message)
        self.kind = kind
        self.kernel_dim = kernel_dim


def _int_row(row) -> tuple[list[int], int]:
    """Primitive integer multiple of ``row`` and the scale used (row * s)."""
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = lcm(den, x.denominator)
    if den == 1:
        ints = [int(x) for x in row]
    else:
        ints = [int(x * den) for x in row]
    return ints, den


def _primitive(row: list[int]) -> list[int]:
    g = gcd(*row)
    if g > 1:
        return [x // g for x in row]
    return row


class Echelon:
    """Incremental fraction-free row echelon form.

    ``add(row)`` reduces the row against the stored pivots and keeps it if
    it is independent.  Pivots are taken left to right, so callers control
    elimination priority through the column order.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []
        self._by_col: dict[int, int] = {}

    def reduce(self, row) -> list[int]:
        r, _ = _int_row(row)
        return self._reduce_int(r)

    def _reduce_int(self, r: list[int]) -> list[int]:
        for idx, p in enumerate(self.pivots):
            c = r[p]
            if c:
                prow = self.rows[idx]
                a = prow[p]
                g = gcd(a, c)
                fa, fc = a // g, c // g
                r = [fa * x - fc * y for x, y in zip(r, prow)]
                r = _primitive(r) if any(r) else r
        return r

    def add(self, row) -> bool:
        r = self.reduce(row)
        for j, x in enumerate(r):
            if x:
                if x < 0:
                    r = [-y for y in r]
                self.rows.append(_primitive(r))
                self.pivots.append(j)
                self._by_col[j] = len(self.rows) - 1
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduced(self) -> tuple[list[list[Fraction]], list[int]]:
        """Fully reduced echelon form with unit pivots, sorted by pivot column."""
        order = sorted(range(len(self.pivots)), key=lambda i: self.pivots[i])
        rows = [self.rows[i] for i in order]
        piv = [self.pivots[i] for i in order]
        for k in range(len(rows) - 1, -1, -1):
            p = piv[k]
            prow = rows[k]
            for i in range(k):
                c = rows[i][p]
                if c:
                    a = prow[p]
                    g = gcd(a, c)
                    fa, fc = a // g, c // g
                    rows[i] = _primitive([fa * x - fc * y for x, y in zip(rows[i], prow)])
        out = []
        for r, p in zip(rows, piv):
            lead = r[p]
            out.append([Fraction(x, lead) for x in r])
        return out, piv


def _echelon(rows, ncols=None) -> Echelon:
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    ech = Echelon(ncols)
    for r in rows:
        ech.add(r)
    return ech


def rank(rows, ncols=None) -> int:
    return _echelon(rows, ncols).rank


def rref(rows, ncols=None):
    return _echelon(rows, ncols).reduced()


def nullspace(rows, ncols=None) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column."""
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    red, piv = rref(rows, ncols)
    free = [j for j in range(ncols) if j not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(red, piv):
            v[p] = -r[f]
        basis.append(v)
    return basis


def solve(A, b, *, require_unique: bool = True) -> list[Fraction]:
    """Solve A x = b exactly over Q.

    Raises LinearSystemError(kind="inconsistent") when no solution exists and
    kind="underdetermined" when the solution is not unique (unless
    ``require_unique`` is False, in which case free variables are set to 0).
    """
    A = list(A)
    if len(A) != len(b):
        raise ValueError("row count mismatch")
    n = len(A[0]) if A else 0
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    ech = _echelon(aug, n + 1)
    if n in ech.pivots:
        raise LinearSystemError("inconsistent", "linear system is inconsistent")
    if ech.rank < n and require_unique:
        raise LinearSystemError(
            "underdetermined",
            f"linear system has a {n - ech.rank}-dimensional solution space",
            n - ech.rank,
        )
    red, piv = ech.reduced()
    x = [Fraction(0)] * n
    for r, p in zip(red, piv):
        x[p] = r[n]
    return x


def det(M) -> Fraction:
    """Determinant of a square rational matrix (Bareiss)."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for r in M:
        ints, s = _int_row(r)
        rows.append(ints)
        scale /= s
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k]:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pk = rows[k][k]
        for i in range(k + 1, n):
            ri, rk = rows[i], rows[k]
            rik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pk - rik * rk[j]) // prev
            ri[k] = 0
        prev = pk
    return sign * rows[n - 1][n - 1] * scale


def split_cyclotomic(rows, rhs=None):
    """Expand equations with Q(zeta_N) coefficients into rational equations.

    Each row becomes phi(N) rows, one per zeta-coordinate; rational entries
    contribute to the zeta^0 coordinate only.  Valid when the unknowns are
    rational.
    """
    rows = list(rows)
    phi = None
    for r in rows:
        for x in list(r) + ([] if rhs is None else []):
            if isinstance(x, CycNum):
                phi = x.phi
                break
        if phi:
            break
    if rhs is not None:
        for x in rhs:
            if isinstance(x, CycNum):
                phi = x.phi
    if phi is None:
        return (rows, list(rhs)) if rhs is not None else rows

    def coords(x):
        if isinstance(x, CycNum):
            return x.coordinates()
        return [Fraction(x)] + [Fraction(0)] * (phi - 1)

    out_rows, out_rhs = [], []
    for i, r in enumerate(rows):
        cs = [coords(x) for x in r]
        rc = coords(rhs[i]) if rhs is not None else None
        for k in range(phi):
            out_rows.append([c[k] for c in cs])
            if rc is not None:
                out_rhs.append(rc[k])
    return (out_rows, out_rhs) if rhs is not None else out_rows
