"""Exact linear algebra over expansions at P: the minimal equation F_N,
the linear relations among F_1..F_{g+1}, their Cramer solution H_i = U_i/Delta,
and reduction of functions in K(P) to polynomials in the generators.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .linalg import LinearSystemError, solve
from .poly import Poly, poly_det
from .series import LaurentSeries

__all__ = [
    "RelationError",
    "RelationRow",
    "RationalRep",
    "minimal_equation",
    "minimal_equation_shape",
    "relation_coeffs",
    "solve_Hi",
    "reduce_to_poly",
    "ReductionError",
    "XY",
    "fvars",
    "series_residual",
]

XY = ("X", "Y")

DEFAULT_GUARD = 25


class RelationError(ArithmeticError):
    """A linear system over expansions failed (precision or generator problem)."""


class ReductionError(ArithmeticError):
    pass


def fvars(g: int) -> tuple[str, ...]:
    return tuple(f"F{k}" for k in range(1, g + 2))


class _Monomials:
    """Products of basis series with shared powers."""

    def __init__(self, basis: list[LaurentSeries]):
        self.basis = basis
        self.cache: dict[tuple, LaurentSeries] = {}

    def get(self, exps: tuple) -> LaurentSeries:
        exps = tuple(exps)
        hit = self.cache.get(exps)
        if hit is not None:
            return hit
        nz = [i for i, k in enumerate(exps) if k]
        if not nz:
            s = LaurentSeries.constant(1, self.basis[0].tag, self.basis[0].prec - self.basis[0].val)
        elif len(nz) == 1 and exps[nz[0]] == 1:
            s = self.basis[nz[0]]
        else:
            # peel one factor off the highest-index variable
            i = nz[-1]
            rest = list(exps)
            rest[i] -= 1
            s = self.get(tuple(rest)) * self.basis[i]
        self.cache[exps] = s
        return s


def _leading_unit(s: LaurentSeries, name: str):
    if s.is_zero():
        raise RelationError(f"{name} is zero to working precision")
    return s.leading_coefficient()


def _solve_series_combination(target: LaurentSeries, columns: list[LaurentSeries], lo: int):
    """Find x with target = sum x_j columns_j, using all exponents lo..prec-1."""
    prec = min([target.prec] + [c.prec for c in columns])
    if prec <= 0:
        raise RelationError(f"working precision {prec} too small (need exponents up to 0)")
    A, b = [], []
    for e in range(lo, prec):
        A.append([c[e] if e >= c.val else 0 for c in columns])
        b.append(target[e] if e >= target.val else 0)
    try:
        return solve(A, b), prec
    except LinearSystemError as exc:
        raise RelationError(f"{exc.kind} system ({exc}); raise precision or check generators") from exc


def minimal_equation_shape(g: int) -> list[tuple[int, int]]:
    """(j, k) for the unknown coefficient of X^k Y^j; deg Phi_j <= g+1-j."""
    return [(j, k) for j in range(g + 1) for k in range(g + 2 - j)]


def minimal_equation(F1: LaurentSeries, F2: LaurentSeries, g: int, *, monic: bool = False) -> Poly:
    """The polynomial Y^{g+1} - X^{g+2} + sum Phi_j(X) Y^j vanishing on (F1, F2).

    The inputs may have any nonzero leading coefficients; they are rescaled
    to unit leading coefficient internally and the result is returned as a
    primitive integer polynomial with positive Y^{g+1} coefficient (or in
    the monic form for the given scaling if ``monic``).
    """
    if g < 1:
        raise ValueError("minimal_equation needs g >= 1")
    if F1.val != -(g + 1) or F2.val != -(g + 2):
        raise RelationError(
            f"pole orders at P are {-F1.val}, {-F2.val}; expected {g + 1}, {g + 2}"
        )
    c1, c2 = _leading_unit(F1, "F1"), _leading_unit(F2, "F2")
    X, Y = F1 / c1, F2 / c2
    mono = _Monomials([X, Y])
    shape = minimal_equation_shape(g)
    cols = [mono.get((k, j)) for j, k in shape]
    target = mono.get((g + 2, 0)) - mono.get((0, g + 1))
    sol, _ = _solve_series_combination(target, cols, -(g + 1) * (g + 2))
    terms = {(0, g + 1): 1, (g + 2, 0): -1}
    for (j, k), v in zip(shape, sol):
        terms[(k, j)] = terms.get((k, j), 0) + v
    P = Poly(XY, terms)
    # undo the scaling: X_unit = X / c1, Y_unit = Y / c2
    x = Poly.var(XY, "X") * (Fraction(1) / Fraction(c1))
    y = Poly.var(XY, "Y") * (Fraction(1) / Fraction(c2))
    P = P.substitute("X", x).substitute("Y", y)
    if monic:
        return P.monic_in("Y")
    return canonical_equation(P)


def canonical_equation(P: Poly) -> Poly:
    """Primitive integer form with positive Y^top coefficient."""
    P = P.primitive()
    top = P.degree("Y")
    lc = P.coeff_in("Y", top)
    sign = 1
    if lc.terms:
        lead = lc.sorted_terms()[0][1]
        sign = 1 if lead > 0 else -1
    return P * sign


def series_residual(P: Poly, values: dict) -> LaurentSeries:
    return P.evaluate(values)


@dataclass
class RelationRow:
    """F1*F_{i+2} - F2*F_{i+1} + sum a_k F_k F1 + sum b_k F_k + c = 0."""

    i: int
    a: list  # a_{i,k}, k = 1..i+1
    b: list  # b_{i,k}, k = 1..g+1
    c: Fraction
    kernel_dim: int = 0

    def as_poly(self, g: int) -> Poly:
        V = fvars(g)
        F = [Poly.var(V, v) for v in V]
        P = F[0] * F[self.i + 1] - F[1] * F[self.i]
        for k, ak in enumerate(self.a, start=1):
            P = P + F[k - 1] * F[0] * ak
        for k, bk in enumerate(self.b, start=1):
            P = P + F[k - 1] * bk
        return P + self.c


def relation_coeffs(F: list[LaurentSeries], i: int) -> RelationRow:
    """Coefficients of the relation of index i among the (unit-leading) expansions F."""
    g = len(F) - 1
    if g < 2:
        raise ValueError("relations need g >= 2")
    if not 1 <= i <= g - 1:
        raise ValueError(f"relation index {i} outside 1..{g - 1}")
    for k, f in enumerate(F, start=1):
        if f.val != -(g + k):
            raise RelationError(f"F{k} has pole order {-f.val}, expected {g + k}")
        if f.leading_coefficient() != 1:
            raise RelationError(f"F{k} does not have leading coefficient 1")
    target = -(F[0] * F[i + 1] - F[1] * F[i])
    cols = [F[k - 1] * F[0] for k in range(1, i + 2)] + list(F)
    tag = F[0].tag
    cols.append(LaurentSeries.constant(1, tag, min(c.prec for c in cols)))
    lo = -(2 * g + i + 3)
    prec = min([target.prec] + [c.prec for c in cols])
    A = [[c[e] if e >= c.val else 0 for c in cols] for e in range(lo, prec)]
    b = [target[e] if e >= target.val else 0 for e in range(lo, prec)]
    kdim = 0
    try:
        x = solve(A, b)
    except LinearSystemError as exc:
        if exc.kind != "underdetermined":
            raise RelationError(f"relation {i}: {exc}") from exc
        # not unique: free variables set to 0 and the multiplicity is flagged
        kdim = exc.kernel_dim
        x = solve(A, b, require_unique=False)
    a = x[: i + 1]
    bb = x[i + 1 : i + 1 + g + 1]
    c = x[-1]
    return RelationRow(i, a, bb, c, kdim)


@dataclass
class RationalRep:
    """F_i = U_i / Delta in X = F1, Y = F2."""

    index: int
    U: Poly
    Delta: Poly


def _cramer_matrix(rows: list[RelationRow], g: int):
    X = Poly.var(XY, "X")
    Y = Poly.var(XY, "Y")
    n = g - 1
    A = [[Poly(XY) for _ in range(n)] for _ in range(n)]
    rhs = []
    for r, row in enumerate(rows):
        i = row.i
        # coefficient of F_j, j = 3..g+1, column j-3
        for j in range(3, g + 2):
            e = Poly(XY)
            if j == i + 2:
                e = e + X
            if j == i + 1:
                e = e - Y
            if j <= i + 1:
                e = e + X * row.a[j - 1]
            e = e + row.b[j - 1]
            A[r][j - 3] = e
        known = Poly.const(XY, row.c)
        if i + 1 <= 2:
            known = known - Y * (X if i + 1 == 1 else Y)
        for k in (1, 2):
            if k <= i + 1:
                known = known + X * (X if k == 1 else Y) * row.a[k - 1]
            known = known + (X if k == 1 else Y) * row.b[k - 1]
        rhs.append(-known)
    return A, rhs


def solve_Hi(rows: list[RelationRow], g: int) -> list[RationalRep]:
    """Cramer's rule on the relation system; returns U_i/Delta for i = 3..g+1."""
    if g < 2:
        raise ValueError("solve_Hi needs g >= 2")
    if len(rows) != g - 1:
        raise ValueError(f"need {g - 1} relation rows, got {len(rows)}")
    A, rhs = _cramer_matrix(rows, g)
    Delta = poly_det(A)
    if Delta.is_zero():
        raise RelationError("coefficient matrix of the relations is singular")
    Us = []
    for j in range(g - 1):
        M = [list(r) for r in A]
        for r in range(g - 1):
            M[r][j] = rhs[r]
        Us.append(poly_det(M))
    # common clearing: make Delta primitive integer with positive leading term
    scale = Fraction(1) / Delta.content()
    lead = Delta.sorted_terms()[0][1]
    if lead < 0:
        scale = -scale
    Delta = Delta * scale
    return [RationalRep(j + 3, U * scale, Delta) for j, U in enumerate(Us)]


def reduce_to_poly(F: LaurentSeries, basis: list[LaurentSeries], g: int, *, guard: int = 0):
    """Polynomial Q in F1..F_{g+1} with F = Q(F1, ...) to the working precision.

    ``basis`` must be the unit-leading expansions at P with pole orders g+1..2g+1.
    Returns (Q, residual) where ``residual`` is F - Q(F), which must vanish.
    """
    V = fvars(g)
    mono = _Monomials(basis)
    terms: dict[tuple, Fraction] = {}
    rem = F
    width = 2 * g + 1
    while not rem.is_zero() and rem.val < 0:
        n = -rem.val
        c = rem.leading_coefficient()
        ell, k = divmod(n, width)
        e = [0] * (g + 1)
        if k == 0:
            e[g] = ell
        elif k <= g:
            if ell == 0:
                raise ReductionError(
                    f"pole order {n} <= g = {g} cannot occur in K(P) unless P is a Weierstrass point"
                    " or the precision is insufficient"
                )
            e[g] = ell - 1
            e[0] += 1
            e[k - 1] += 1
        else:
            e[g] = ell
            e[k - g - 1] += 1
        U = mono.get(tuple(e))
        if U.val != rem.val or U.leading_coefficient() != 1:
            raise ReductionError(f"monomial {e} does not have pole order {n} with unit leading coefficient")
        rem = rem - U * c
        terms[tuple(e)] = terms.get(tuple(e), 0) + c
        if rem.prec <= 0:
            raise ReductionError("precision exhausted during reduction; raise precision")
    const = rem[0] if rem.prec > 0 else None
    if const is None:
        raise ReductionError("precision exhausted during reduction; raise precision")
    if const:
        terms[(0,) * (g + 1)] = terms.get((0,) * (g + 1), 0) + const
        rem = rem - const
    Q = Poly(V, terms)
    return Q, rem
