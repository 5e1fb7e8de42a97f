"""Search for the generators F_1..F_{g+1} of K(P), P = <1/1>.

Candidates are traces T(W_a) and T(W_a W_b) whose order bounds pass the
filter; their exact expansions are then row-reduced jointly on the
principal parts at the other cusps and the pole part at P.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .exact import CycNum, euler_phi
from .modcurve import CuspClass, WVector, cusps_gamma0, divisors, genus0
from .weier import ExpansionError, ModFuncExpr, TraceTerm, parse_expr

__all__ = [
    "SearchBounds",
    "SearchError",
    "GeneratorSystem",
    "canonical_vectors",
    "candidate_pool",
    "iter_candidates",
    "assemble_generators",
    "search_generators",
    "verify_system",
    "system_from_exprs",
    "load_system",
    "save_system",
]

log = logging.getLogger(__name__)


class SearchError(RuntimeError):
    pass


@dataclass
class SearchBounds:
    """Limits for the candidate pool.

    ``slack`` widens the allowed pole order at P beyond 2g+1 (None: 2g);
    ``max_entry`` caps the vector entries (None: N//2, i.e. everything
    up to the symmetry of the p-function).
    """

    max_entry: int | None = None
    max_terms: int = 2
    slack: int | None = None
    max_candidates: int = 4000

    def to_json_obj(self):
        return {
            "max_entry": self.max_entry,
            "max_terms": self.max_terms,
            "slack": self.slack,
            "max_candidates": self.max_candidates,
        }


# -- vectors and order tables ---------------------------------------------------

def _norm(x: int, N: int) -> int:
    x %= N
    return min(x, N - x)


def _canon(v, N: int) -> tuple:
    """Representative up to sign: entries in 1..N/2, each half sorted."""
    a = [_norm(x, N) for x in v]
    return (min(a[0], a[1]), max(a[0], a[1]), min(a[2], a[3]), max(a[2], a[3]))


def canonical_vectors(N: int, max_entry: int | None = None) -> list[tuple]:
    """All valid W-vectors up to sign, excluding the constant (a1,a2) = (a3,a4)."""
    top = N // 2 if max_entry is None else min(max_entry, N // 2)
    pairs = [(x, y) for x in range(1, top + 1) for y in range(x + 1, top + 1)]
    return [p + q for p in pairs for q in pairs if p != q]


def _order_columns(N: int):
    cols = []
    for D in divisors(N):
        M = N // D
        smax = max(1, M // 2)
        for s in range(1, smax + 1):
            if gcd(s, M) == 1:
                cols.append((D, s))
    return cols


def _order_table(vecs: list[tuple], N: int):
    """Orders of W_{s a} at (1:D) for every (D, s) column (q_D units)."""
    cols = _order_columns(N)
    A = np.array(vecs, dtype=np.int64).reshape(-1, 4)
    out = np.empty((len(vecs), len(cols)), dtype=np.int64)
    for j, (D, s) in enumerate(cols):
        M = N // D
        r = (A * s) % M
        b = np.minimum(r, M - r)
        out[:, j] = np.minimum(b[:, 0], b[:, 1]) - np.minimum(b[:, 2], b[:, 3])
    groups = {}
    for j, (D, _) in enumerate(cols):
        groups.setdefault(D, []).append(j)
    return out, groups


def _group_min(T, groups, Ds):
    return np.stack([T[:, groups[D]].min(axis=1) for D in Ds], axis=1)


def _units_pm(N):
    return [k for k in range(1, N // 2 + 1) if gcd(k, N) == 1]


def _orbit_key(vs: tuple, N: int) -> tuple:
    best = None
    for lam in _units_pm(N):
        k = tuple(sorted(_canon([lam * x for x in v], N) for v in vs))
        if best is None or k < best:
            best = k
    return best


@dataclass
class Candidate:
    expr: ModFuncExpr
    bounds: dict  # D -> lower bound in q_D units

    def __str__(self):
        return self.expr.to_text()


def iter_candidates(N: int, g: int, bounds: SearchBounds | None = None):
    """Single traces first, then products, each in a fixed order."""
    bounds = bounds or SearchBounds()
    slack = 2 * g if bounds.slack is None else bounds.slack
    lo = -(2 * g + 1 + slack)
    hi = -(g + 1)
    Ds = divisors(N)
    widths = np.array([gcd(D, N // D) for D in Ds[1:]], dtype=np.int64)
    vecs = canonical_vectors(N, bounds.max_entry)
    if not vecs:
        return
    T, groups = _order_table(vecs, N)

    def passes(B):
        ok = (B[:, 0] >= lo) & (B[:, 0] <= hi)
        if len(Ds) > 1:
            ok &= np.all(B[:, 1:] >= -widths, axis=1)
        return ok

    seen = set()
    B1 = _group_min(T, groups, Ds)
    for i in np.nonzero(passes(B1))[0]:
        key = _orbit_key((vecs[i],), N)
        if key in seen:
            continue
        seen.add(key)
        v = WVector(*vecs[i])
        yield Candidate(
            ModFuncExpr(N, 0, (TraceTerm(Fraction(1), v),)),
            {D: int(B1[i, k]) for k, D in enumerate(Ds)},
        )
    if bounds.max_terms < 2:
        return
    for i in range(len(vecs)):
        B2 = _group_min(T[i] + T[i:], groups, Ds)
        for j in np.nonzero(passes(B2))[0]:
            a, b = vecs[i], vecs[i + j]
            key = _orbit_key((a, b), N)
            if key in seen:
                continue
            seen.add(key)
            yield Candidate(
                ModFuncExpr(N, 0, (TraceTerm(Fraction(1), WVector(*a), WVector(*b)),)),
                {D: int(B2[j, k]) for k, D in enumerate(Ds)},
            )


def candidate_pool(N: int, bounds: SearchBounds | None = None, limit: int | None = None) -> list:
    """The first ``limit`` candidates (all of them if None) as expressions."""
    g = genus0(N)
    out = []
    for c in iter_candidates(N, g, bounds):
        out.append(c.expr)
        if limit is not None and len(out) >= limit:
            break
    if not out:
        raise SearchError(f"empty candidate pool for N={N} with bounds {bounds}")
    return out


# -- generator systems -------------------------------------------------------------------

@dataclass
class GeneratorSystem:
    N: int
    g: int
    funcs: list
    provenance: str = "searched"
    expansions: dict = field(default_factory=dict)  # CuspClass -> list of series

    def expand(self, prec_at) -> dict:
        """Expansions of every generator at every cusp; prec_at: int or callable(Q)."""
        out = {}
        for Q in cusps_gamma0(self.N):
            p = prec_at(Q) if callable(prec_at) else prec_at
            out[Q] = [f.expansion(Q, p) for f in self.funcs]
        self.expansions = out
        return out

    def to_json_obj(self) -> dict:
        return {"N": self.N, "g": self.g, "functions": [f.to_text() for f in self.funcs]}


def system_from_exprs(N: int, texts, provenance="loaded-from-file", *, normalize=True) -> GeneratorSystem:
    funcs = [parse_expr(t, N) if isinstance(t, str) else t for t in texts]
    sys_ = GeneratorSystem(N, genus0(N), funcs, provenance)
    if normalize:
        sys_.funcs = [_unit_leading(f) for f in sys_.funcs]
    return sys_


def _unit_leading(f: ModFuncExpr) -> ModFuncExpr:
    P = cusps_gamma0(f.level)[0]
    s = f.expansion(P, 1)
    if s.is_zero():
        raise SearchError(f"{f} vanishes at <1/1> to the working precision")
    c = s.leading_coefficient()
    return f if c == 1 else f.scale(Fraction(1) / Fraction(c))


def save_system(sys_: GeneratorSystem, path: str):
    with open(path, "w") as fh:
        json.dump(sys_.to_json_obj(), fh, indent=1)
        fh.write("\n")


def load_system(path: str, *, normalize=True) -> GeneratorSystem:
    with open(path) as fh:
        obj = json.load(fh)
    N = int(obj["N"])
    sys_ = system_from_exprs(N, obj["functions"], "loaded-from-file", normalize=normalize)
    if "g" in obj:
        sys_.g = int(obj["g"])
    return sys_


def verify_system(sys_: GeneratorSystem, prec: int = 4) -> list[str]:
    """Violations of the generator invariants (empty list when all hold)."""
    problems = []
    N = sys_.N
    try:
        g = genus0(N)
    except ValueError as exc:
        return [f"level: {exc}"]
    if sys_.g != g:
        problems.append(f"genus: system says {sys_.g}, X_0({N}) has genus {g}")
    if len(sys_.funcs) != g + 1:
        problems.append(f"count: {len(sys_.funcs)} functions, expected {g + 1}")
    for k, f in enumerate(sys_.funcs, start=1):
        if f.level != N:
            problems.append(f"level: F{k} is defined at level {f.level}, system level is {N}")
    if problems:
        return problems
    for Q in cusps_gamma0(N):
        for k, f in enumerate(sys_.funcs, start=1):
            try:
                s = f.expansion(Q, prec)
            except (ExpansionError, ValueError) as exc:
                problems.append(f"expansion: F{k} at {Q}: {exc}")
                continue
            if Q.D == 1:
                want = -(g + k)
                if s.is_zero() or s.val != want:
                    problems.append(f"pole order: F{k} has valuation {s.val} at {Q}, expected {want}")
                elif s.leading_coefficient() != 1:
                    problems.append(
                        f"normalization: F{k} has leading coefficient {s.leading_coefficient()} at {Q}"
                    )
            elif not s.is_zero() and s.val < 0:
                problems.append(f"regularity: F{k} has a pole of order {-s.val} at {Q}")
    if g >= 1 and len(sys_.funcs) >= 2 and not problems:
        # d(F1) = g+1 and d(F2) = g+2 must be coprime
        if gcd(g + 1, g + 2) != 1:
            problems.append("pole orders of F1, F2 are not coprime")
    return problems


# -- elimination ------------------------------------------------------------------

def _coords(c, phi):
    if isinstance(c, CycNum):
        return c.coordinates()
    return [Fraction(c)] + [Fraction(0)] * (phi - 1)


class _Reducer:
    """Incremental echelon form of rows tagged with candidate combinations."""

    def __init__(self):
        self.rows: dict[int, tuple[list, dict]] = {}

    def add(self, row: list, combo: dict):
        row = list(row)
        combo = dict(combo)
        for p in sorted(self.rows):
            if row[p]:
                prow, pcombo = self.rows[p]
                c = row[p]
                row = [x - c * y for x, y in zip(row, prow)]
                for k, v in pcombo.items():
                    combo[k] = combo.get(k, 0) - c * v
        piv = next((i for i, x in enumerate(row) if x), None)
        if piv is None:
            return None
        c = row[piv]
        row = [x / c for x in row]
        combo = {k: v / c for k, v in combo.items() if v}
        self.rows[piv] = (row, combo)
        return piv


def assemble_generators(candidates, N: int, g: int, *, max_pole: int | None = None,
                        max_candidates: int = 4000) -> GeneratorSystem:
    """Row-reduce candidate expansions until pole orders g+1..2g+1 are all reached."""
    cusps = cusps_gamma0(N)
    P = cusps[0]
    others = cusps[1:]
    phi = euler_phi(N)
    K = max_pole if max_pole is not None else 4 * g + 1
    # columns: principal part (exponent -1 in the local parameter) at each other cusp,
    # then the q^-K .. q^-1 coefficients at P
    ncols_other = len(others) * phi
    red = _Reducer()
    exprs = []
    need = set(range(g + 1, 2 * g + 2))
    got: dict[int, int] = {}
    tried = 0
    for cand in candidates:
        if tried >= max_candidates:
            break
        tried += 1
        e = cand.expr if isinstance(cand, Candidate) else cand
        try:
            sP = e.expansion(P, 1)
            sQ = [e.expansion(Q, 0) for Q in others]
        except ExpansionError as exc:
            log.debug("skipping %s: %s", e, exc)
            continue
        if any(not s.is_zero() and s.val < -1 for s in sQ):
            continue
        if not sP.is_zero() and sP.val < -K:
            continue
        row = []
        for s in sQ:
            row.extend(_coords(s[-1], phi) if not s.is_zero() and s.val <= -1 else [Fraction(0)] * phi)
        row.extend(Fraction(sP[-n]) if -n >= sP.val else Fraction(0) for n in range(K, 0, -1))
        idx = len(exprs)
        exprs.append(e)
        piv = red.add(row, {idx: Fraction(1)})
        if piv is None or piv < ncols_other:
            continue
        n = K - (piv - ncols_other)
        if n <= g:
            raise SearchError(
                f"found a function with a single pole of order {n} <= g = {g} at <1/1>;"
                " <1/1> would be a Weierstrass point"
            )
        got[n] = piv
        log.info("pole order %d reached after %d candidates", n, tried)
        if need <= set(got):
            break
    missing = sorted(need - set(got))
    if missing:
        raise SearchError(
            f"N={N}: pole orders {missing} not reached after {tried} candidates"
            f" (reached {sorted(got)}); widen the bounds"
        )
    funcs = []
    for n in range(g + 1, 2 * g + 2):
        _, combo = red.rows[got[n]]
        f = ModFuncExpr(N, 0, ())
        for k, c in sorted(combo.items()):
            f = f + exprs[k].scale(c)
        s = f.expansion(P, 1)
        f = f.scale(Fraction(1) / Fraction(s.leading_coefficient()))
        c0 = f.expansion(P, 1)[0]
        if c0:
            f = f - c0
        funcs.append(f)
    return GeneratorSystem(N, g, funcs, "searched")


def search_generators(N: int, bounds: SearchBounds | None = None) -> GeneratorSystem:
    bounds = bounds or SearchBounds()
    g = genus0(N)
    slack = 2 * g if bounds.slack is None else bounds.slack
    cands = iter_candidates(N, g, bounds)
    return assemble_generators(
        cands, N, g, max_pole=2 * g + 1 + slack, max_candidates=bounds.max_candidates
    )
