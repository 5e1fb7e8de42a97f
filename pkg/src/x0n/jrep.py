"""The modular invariant j and its representation by the generators."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact import CycNum
from .modcurve import CuspClass, cusps_gamma0
from .poly import Poly
from .relations import XY, RationalRep, ReductionError, fvars, reduce_to_poly
from .series import LaurentSeries, VarTag, int_convolve

__all__ = [
    "CUSP",
    "JRepError",
    "j_expansion",
    "j_expansion_at",
    "j_pole_order",
    "CuspKiller",
    "JRepresentation",
    "find_cusp_killer",
    "cusp_killers",
    "represent_J",
    "collapse",
    "CollapsedRep",
    "evaluate_j",
    "upoly_gcd",
]


class _CuspMarker:
    """Returned by evaluate_j at points where j has a pole (cusps)."""

    def __repr__(self):
        return "CUSP"

    __str__ = __repr__


CUSP = _CuspMarker()


class JRepError(ArithmeticError):
    pass


# -- j as a q-series -----------------------------------------------------------

@lru_cache(maxsize=8)
def _j_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of q*j(q) for q^0..q^(n-1)."""
    # E4 = 1 + 240 sum sigma_3(m) q^m
    sig = [0] * n
    for d in range(1, n):
        d3 = d ** 3
        for m in range(d, n, d):
            sig[m] += d3
    e4 = [1] + [240 * s for s in sig[1:]]
    # prod (1 - q^m) from the pentagonal number theorem
    eta = [0] * n
    k = 0
    while True:
        done = True
        for kk in ((k, -k) if k else (0,)):
            e = kk * (3 * kk - 1) // 2
            if e < n:
                eta[e] += -1 if kk % 2 else 1
                done = False
        if done and k > 0:
            break
        k += 1
    # Delta / q = eta^24
    p = [1] + [0] * (n - 1)
    base = eta
    k = 24
    while k:
        if k & 1:
            p = int_convolve(p, base, n)
        k >>= 1
        if k:
            base = int_convolve(base, base, n)
    e4c = int_convolve(int_convolve(e4, e4, n), e4, n)
    # divide e4^3 by p (p[0] = 1) exactly
    out = [0] * n
    for i in range(n):
        s = e4c[i]
        for j in range(1, i + 1):
            if p[j]:
                s -= p[j] * out[i - j]
        out[i] = s
    return tuple(out)


def j_expansion(prec: int) -> LaurentSeries:
    """j = E4^3 / Delta in q = exp(2 pi i tau), terms of exponent < prec."""
    if prec < 0:
        raise ValueError("precision must be >= 0")
    n = prec + 1
    return LaurentSeries(VarTag(1, 1, 1), -1, list(_j_coeffs(n)), prec)


def j_pole_order(Q: CuspClass) -> int:
    """Pole order of j at Q in the local parameter q_D^width."""
    return Q.N // (Q.D * Q.width)


def j_expansion_at(Q: CuspClass, prec: int) -> LaurentSeries:
    """j at <u/D> in the local parameter t = q_D^width: q = t^(N/(D*width))."""
    k = j_pole_order(Q)
    base_prec = -(-prec // k)  # need q-exponents < prec/k
    js = j_expansion(base_prec)
    tag = VarTag(Q.N, Q.D, Q.width)
    terms = {e * k: c for e, c in js.terms()}
    return LaurentSeries.from_dict(terms, tag, min(prec, base_prec * k))


# -- cusp killers -------------------------------------------------------------------

@dataclass
class CuspKiller:
    """G vanishing at the cusps in ``cusps`` with zero orders ``zero_orders``."""

    G: Poly  # polynomial in F1..F_{g+1}
    m: int
    cusps: list
    zero_orders: list

    def describe(self, style="xy") -> str:
        return _factor_text(self.G, style)


def _factor_text(G: Poly, style: str) -> str:
    P = G
    if style == "xy":
        P = _to_xy(G)
    return P.to_text()


def _to_xy(G: Poly) -> Poly:
    """Rename F1, F2 to X, Y when only those occur."""
    names = {"F1": "X", "F2": "Y"}
    out = {}
    for e, c in G.terms.items():
        if any(k for k in e[2:]):
            return G
        x = e[0] if len(e) > 0 else 0
        y = e[1] if len(e) > 1 else 0
        out[(x, y)] = c
    return Poly(XY, out)


def _minpoly_in_F1(x0, V) -> Poly:
    if isinstance(x0, CycNum):
        coeffs = x0.minpoly()
    else:
        coeffs = [-Fraction(x0), Fraction(1)]
    return Poly.univariate(V, "F1", coeffs)


def find_cusp_killer(Q: CuspClass, exps: list[LaurentSeries], policy: str = "f1"):
    """Killer for Q from the basis expansions at Q.

    policy "f1": the minimal polynomial over Q of F1(Q), evaluated at F1.
    policy "affine": the affine form over Q in 1, F1, .., F_{g+1} of maximal
    valuation at Q, ties broken by preferring fewer generators.
    Returns (G, zero_order).
    """
    g = len(exps) - 1
    V = fvars(g)
    if Q.D == 1:
        raise ValueError("P itself needs no killer")
    for k, s in enumerate(exps, start=1):
        if s.val < 0:
            raise JRepError(f"F{k} has a pole at {Q}; generators are not in K(P)")
    if policy == "f1":
        x0 = exps[0][0] if exps[0].val <= 0 else 0
        G = _minpoly_in_F1(x0, V)
        val = G.evaluate(dict(zip(V, exps)))
        if isinstance(val, LaurentSeries):
            if val.is_zero():
                raise JRepError(f"killer at {Q} vanishes to the working precision {val.prec}")
            return G, val.val
        raise JRepError("killer evaluation failed")
    if policy == "affine":
        return _affine_killer(Q, exps, V)
    raise ValueError(f"unknown killer policy {policy!r}")


def _affine_killer(Q, exps, V):
    from .linalg import nullspace, split_cyclotomic

    g1 = len(exps)
    prec = min(s.prec for s in exps)
    best = None
    # forms c0 + sum c_k F_k with rational c; vanishing of coefficients 0..t-1
    for subset_size in range(1, g1 + 1):
        idx = list(range(subset_size))
        cols = [LaurentSeries.constant(1, exps[0].tag, prec)] + [exps[i] for i in idx]
        found = None
        for t in range(1, prec):
            rows = [[c[e] if e >= c.val else 0 for c in cols] for e in range(0, t)]
            rows = split_cyclotomic(rows)
            ker = nullspace(rows, len(cols))
            if not ker:
                break
            found = (t, ker[0])
        if found and (best is None or found[0] > best[0]):
            best = (found[0], found[1], idx)
    if best is None:
        raise JRepError(f"no affine form vanishes at {Q}")
    t, vec, idx = best
    lead = next(x for x in reversed(vec) if x)
    vec = [x / lead for x in vec]
    terms = {(0,) * len(V): vec[0]}
    for c, i in zip(vec[1:], idx):
        e = [0] * len(V)
        e[i] = 1
        terms[tuple(e)] = c
    G = Poly(V, terms)
    val = G.evaluate(dict(zip(V, exps)))
    return G, val.val


def cusp_killers(N: int, at_cusp: dict, policy: str = "f1") -> list[CuspKiller]:
    """Killers for every cusp other than P; at_cusp maps CuspClass -> expansions."""
    out: list[CuspKiller] = []
    for Q in cusps_gamma0(N):
        if Q.D == 1:
            continue
        G, order = find_cusp_killer(Q, at_cusp[Q], policy)
        if order <= 0:
            raise JRepError(f"killer {G} does not vanish at {Q}")
        m = -(-j_pole_order(Q) // order)
        for K in out:
            if K.G == G:
                K.m = max(K.m, m)
                K.cusps.append(Q)
                K.zero_orders.append(order)
                break
        else:
            out.append(CuspKiller(G, m, [Q], [order]))
    return out


# -- representation ------------------------------------------------------------------

@dataclass
class JRepresentation:
    N: int
    g: int
    killers: list
    P_N: Poly
    residual_prec: int = 0
    collapsed: "CollapsedRep | None" = None
    H: list = field(default_factory=list)
    model: Poly | None = None
    scales: list = field(default_factory=list)

    def denominator(self) -> Poly:
        V = fvars(self.g)
        D = Poly.const(V, 1)
        for K in self.killers:
            D = D * K.G ** K.m
        return D

    def to_json_obj(self) -> dict:
        obj = {
            "killers": [
                {"cusp": {"u": Q.u, "D": Q.D}, "G": K.describe(), "m": K.m, "zero_order": z}
                for K in self.killers
                for Q, z in zip(K.cusps, K.zero_orders)
            ],
            "P_N": self.P_N.to_text("sub"),
        }
        if self.collapsed is not None:
            obj["R_N"] = self.collapsed.to_json_obj()
        return obj


def represent_J(
    N: int,
    g: int,
    basis_P: list[LaurentSeries],
    at_cusp: dict,
    *,
    policy: str = "f1",
    guard: int = 10,
) -> JRepresentation:
    """J * prod G^m = P_N(F1, ..) from unit-leading expansions.

    ``basis_P`` are the expansions at P (unit leading coefficient);
    ``at_cusp`` maps each other cusp to the same functions' expansions there.
    """
    V = fvars(g)
    killers = cusp_killers(N, at_cusp, policy)
    # membership in K(P): valuation >= 0 at every other cusp
    for Q, exps in at_cusp.items():
        if Q.D == 1:
            continue
        jq = j_expansion_at(Q, j_pole_order(Q) + 2)
        prod = jq
        vals = dict(zip(V, exps))
        for K in killers:
            gs = K.G.evaluate(vals)
            prod = prod * gs ** K.m
        if prod.val < 0:
            raise JRepError(f"J * prod G^m still has a pole at {Q} (order {-prod.val})")
    prec = min(s.prec for s in basis_P)
    pole = N + sum(-(K.G.evaluate(dict(zip(V, basis_P))).val) * K.m for K in killers)
    P = next(Q for Q in cusps_gamma0(N) if Q.D == 1)
    jP = j_expansion_at(P, prec)
    target = LaurentSeries(basis_P[0].tag, jP.val, jP.coeffs, jP.prec)
    valsP = dict(zip(V, basis_P))
    for K in killers:
        target = target * K.G.evaluate(valsP) ** K.m
    if target.val != -pole:
        raise JRepError(f"unexpected pole order {-target.val} of J*prod G^m at P (expected {pole})")
    try:
        PN, rem = reduce_to_poly(target, basis_P, g)
    except ReductionError as exc:
        raise JRepError(f"reduction of J*prod G^m failed: {exc}") from exc
    if not rem.is_zero():
        raise JRepError(
            f"residual of the J-representation is nonzero at q^{rem.val}; raise precision"
        )
    return JRepresentation(N, g, killers, PN, residual_prec=rem.prec)


# -- collapse to R_N(X, Y) -------------------------------------------------------------

def upoly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of univariate polynomials (lowest degree first)."""

    def trim(p):
        p = list(p)
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = trim(a), trim(b)
    while b:
        r = list(a)
        while len(r) >= len(b) and r:
            c = Fraction(r[-1]) / b[-1]
            off = len(r) - len(b)
            for i, x in enumerate(b):
                r[off + i] -= c * x
            r = trim(r)
        a, b = b, r
    if not a:
        return []
    lead = Fraction(a[-1])
    return [Fraction(x) / lead for x in a]


def _udiv_exact(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    r = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(len(r) - len(b) + 1, 1)
    while len(r) >= len(b) and any(r):
        c = r[-1] / b[-1]
        off = len(r) - len(b)
        q[off] = c
        for i, x in enumerate(b):
            r[off + i] -= c * x
        while r and r[-1] == 0:
            r.pop()
    if any(r):
        raise ArithmeticError("inexact polynomial division")
    return q


@dataclass
class CollapsedRep:
    """R_N = (sum_k num[k](X) Y^k) / den(X), in lowest terms."""

    num: list  # list of Poly in X (coefficient of Y^k)
    den: Poly
    den_factors: list = field(default_factory=list)  # (Poly, exponent) before cancellation

    def numerator(self) -> Poly:
        Y = Poly.var(XY, "Y")
        out = Poly(XY)
        for k, c in enumerate(self.num):
            out = out + c * Y ** k
        return out

    def den_text(self) -> str:
        """The denominator as a product of the killer factors where they divide it."""
        rest = _as_univariate(self.den)
        parts = []
        for G, m in self.den_factors:
            gu = _as_univariate(G)
            if len(gu) < 2:
                continue
            gu = [c / gu[-1] for c in gu]
            k = 0
            while k < m:
                try:
                    rest = _udiv_exact(rest, gu)
                except ArithmeticError:
                    break
                k += 1
            if k:
                t = Poly.univariate(XY, "X", gu).to_text()
                t = t if len(gu) == 2 and gu[0] == 0 else f"({t})"
                parts.append(t if k == 1 else f"{t}^{k}")
        if rest != [1] or not parts:
            return self.den.to_text()
        return "*".join(parts)

    def to_json_obj(self) -> dict:
        # highest power of Y first, as in (B(X) Y + A(X)) / C(X)
        return {"num": [c.to_text() for c in reversed(self.num)], "den": self.den_text()}


def _as_univariate(P: Poly) -> list[Fraction]:
    return P.univariate_coeffs("X") if P.terms else []


def collapse(rep: JRepresentation, model: Poly | None, H: list[RationalRep]) -> CollapsedRep:
    """Rewrite J in the form (sum A_k(X) Y^k) / D(X) with the Y-degree below g+1.

    Only possible with univariate denominators, i.e. when every killer is a
    polynomial in F1 and (for g >= 2) Delta depends on X alone.
    """
    g = rep.g
    V = fvars(g)
    X = Poly.var(XY, "X")
    Y = Poly.var(XY, "Y")
    subst = {"F1": X, "F2": Y}
    den = Poly.const(XY, 1)
    den_factors = []
    for K in rep.killers:
        Gxy = _substitute_xy(K.G, subst, {})
        if Gxy.degree("Y") > 0:
            raise JRepError("killer depends on Y; no univariate denominator")
        den = den * Gxy ** K.m
        den_factors.append((Gxy, K.m))
    if g == 0:
        num = _substitute_xy(rep.P_N, {"F1": X}, {})
        return _lowest_terms([num], den, den_factors)
    hmap = {}
    delta = None
    for h in H:
        if h.Delta.degree("Y") > 0:
            raise JRepError("Delta depends on Y; the collapsed form is not univariate")
        delta = h.Delta
        hmap[f"F{h.index}"] = h.U
    # P_N(X, Y, U_3/Delta, ...) * Delta^k with k = max total degree in F3..
    kmax = 0
    for e in rep.P_N.terms:
        kmax = max(kmax, sum(e[2:]))
    num = Poly(XY)
    for e, c in rep.P_N.terms.items():
        t = Poly.const(XY, c) * X ** e[0]
        if g >= 1:
            t = t * Y ** e[1]
        extra = 0
        for idx in range(2, len(e)):
            if e[idx]:
                t = t * hmap[f"F{idx + 1}"] ** e[idx]
                extra += e[idx]
        if kmax - extra:
            t = t * delta ** (kmax - extra)
        num = num + t
    if kmax:
        den = den * delta ** kmax
        den_factors.append((delta, kmax))
    num = num.reduce_monic("Y", model)
    coeffs = [num.coeff_in("Y", k) for k in range(g + 1)]
    return _lowest_terms(coeffs, den, den_factors)


def _substitute_xy(P: Poly, subst: dict, _):
    out = Poly(XY)
    for e, c in P.terms.items():
        t = Poly.const(XY, c)
        for name, k in zip(P.vars, e):
            if k:
                if name not in subst:
                    raise JRepError(f"cannot express {name} in X, Y")
                t = t * subst[name] ** k
        out = out + t
    return out


def _lowest_terms(coeffs: list, den: Poly, den_factors) -> CollapsedRep:
    cu = [_as_univariate(c) for c in coeffs]
    du = _as_univariate(den)
    g = du
    for c in cu:
        if c:
            g = upoly_gcd(g, c)
    if len(g) > 1:
        cu = [_udiv_exact(c, g) if c else c for c in cu]
        du = _udiv_exact(du, g)
    lead = du[-1]
    cu = [[x / lead for x in c] for c in cu]
    du = [x / lead for x in du]
    num = [Poly.univariate(XY, "X", c) if c else Poly(XY) for c in cu]
    return CollapsedRep(num, Poly.univariate(XY, "X", du), den_factors)


# -- evaluation at points of the model ------------------------------------------------------

_LOCAL = VarTag(0, 0, 1)


def _series_root(model: Poly, x0: Fraction, y0: Fraction, prec: int, solve_for: str):
    """Branch of model = 0 through (x0, y0), parametrised by the other coordinate.

    Needs the partial derivative in ``solve_for`` to be nonzero at the point;
    each pass of the simple lift fixes one more coefficient.
    """
    t = LaurentSeries(_LOCAL, 1, [1], prec)
    fixed = LaurentSeries.constant(x0 if solve_for == "Y" else y0, _LOCAL, prec) + t
    moving = LaurentSeries.constant(y0 if solve_for == "Y" else x0, _LOCAL, prec)
    d0 = _derivative(model, solve_for).evaluate({"X": x0, "Y": y0})
    inv = Fraction(1) / Fraction(d0)
    for _ in range(prec):
        vals = {"X": fixed, "Y": moving} if solve_for == "Y" else {"X": moving, "Y": fixed}
        f = model.evaluate(vals)
        if not isinstance(f, LaurentSeries):
            f = LaurentSeries.constant(f, _LOCAL, prec)
        if f.is_zero():
            break
        moving = moving - f * inv
    if solve_for == "Y":
        return fixed, moving
    return moving, fixed


def _derivative(P: Poly, name: str) -> Poly:
    i = P.vars.index(name)
    out = {}
    for e, c in P.terms.items():
        if e[i]:
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c * e[i]
    return Poly(P.vars, out)


def evaluate_j(model: Poly | None, rep, point, prec: int = 24):
    """Exact j at a rational point of the model, or CUSP where j has a pole.

    ``rep`` is a CollapsedRep (or anything with ``numerator()`` and ``den``).
    Raises ValueError for points off the curve and for singular points where
    the value cannot be decided by a local expansion.
    """
    if model is None:
        x0 = Fraction(point[0] if isinstance(point, (tuple, list)) else point)
        num = rep.numerator().evaluate({"X": x0, "Y": Fraction(0)})
        den = rep.den.evaluate({"X": x0, "Y": Fraction(0)})
        if den == 0:
            return CUSP
        return Fraction(num) / Fraction(den)
    x0, y0 = (Fraction(point[0]), Fraction(point[1]))
    if model.evaluate({"X": x0, "Y": y0}) != 0:
        raise ValueError(f"point ({x0}, {y0}) is not on the curve")
    num_p = rep.numerator()
    den_p = rep.den
    nv = num_p.evaluate({"X": x0, "Y": y0})
    dv = den_p.evaluate({"X": x0, "Y": y0})
    if dv != 0:
        return Fraction(nv) / Fraction(dv)
    fy = _derivative(model, "Y").evaluate({"X": x0, "Y": y0})
    fx = _derivative(model, "X").evaluate({"X": x0, "Y": y0})
    if fy != 0:
        xs, ys = _series_root(model, x0, y0, prec, "Y")
    elif fx != 0:
        xs, ys = _series_root(model, x0, y0, prec, "X")
    else:
        raise ValueError(f"point ({x0}, {y0}) is singular on the model")
    ns = num_p.evaluate({"X": xs, "Y": ys})
    ds = den_p.evaluate({"X": xs, "Y": ys})
    if not isinstance(ns, LaurentSeries):
        ns = LaurentSeries.constant(ns, _LOCAL, prec)
    if not isinstance(ds, LaurentSeries):
        ds = LaurentSeries.constant(ds, _LOCAL, prec)
    if ds.is_zero():
        raise ValueError("denominator vanishes identically on the local branch")
    if ns.is_zero() or ns.val > ds.val:
        if ns.is_zero() and ns.prec <= ds.val:
            raise ValueError("precision too small to decide the value")
        return Fraction(0)
    if ns.val < ds.val:
        return CUSP
    return Fraction(ns.leading_coefficient()) / Fraction(ds.leading_coefficient())
