"""Reference data: generator systems, equations and J-representations.

The tables live in ``data/reference.json``.  Generator expressions use the
table notation: ``alpha + a[..] + b[..]*[..]``, with optional parentheses,
references ``F1``.. to other generators of the same system and named
shorthands (``h1``..) defined per record.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .weier import ModFuncExpr, TraceTerm, _vec

__all__ = [
    "ReferenceRecord",
    "reference_data",
    "reference_levels",
    "reference_record",
    "reference_errata",
    "parse_combination",
    "resolve_generators",
]

_TOK = re.compile(
    r"\s*(?:(?P<vec>T?\s*\[[^\]]*\](?:\s*\*\s*\[[^\]]*\])?)"
    r"|(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z]\w*)|(?P<op>[-+*()]))"
)


def _tokens(text: str):
    pos = 0
    out = []
    text = text.replace("−", "-")
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOK.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse {text[pos:]!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


class _Comb:
    """Recursive-descent parser for linear combinations of atoms."""

    def __init__(self, text, N, env):
        self.toks = _tokens(text)
        self.i = 0
        self.N = N
        self.env = env

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def parse(self) -> ModFuncExpr:
        e = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.peek()[1]!r}")
        return e

    def expr(self):
        sign = 1
        while self.peek() in (("op", "+"), ("op", "-")):
            if self.take()[1] == "-":
                sign = -sign
        total = self.term().scale(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            total = total + t if op == "+" else total - t
        return total

    def term(self):
        coeff = Fraction(1)
        kind, val = self.peek()
        if kind == "num":
            self.take()
            coeff = Fraction(val)
            if self.peek() == ("op", "*"):
                self.take()
            elif self.peek()[0] not in ("vec", "name") and self.peek() != ("op", "("):
                return ModFuncExpr(self.N, coeff, ())
        f = self.factor()
        # a parenthesised coefficient may precede an atom: (1/2)[..]
        while self.peek()[0] in ("vec", "name") or self.peek() in (("op", "("), ("op", "*")):
            if self.peek() == ("op", "*"):
                self.take()
            g = self.factor()
            if f.terms and g.terms:
                raise ValueError("product of two non-constant terms")
            if not f.terms:
                f = g.scale(f.constant)
            else:
                f = f.scale(g.constant)
        return f.scale(coeff)

    def factor(self):
        kind, val = self.take()
        if kind == "op" and val == "(":
            e = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("missing ')'")
            return e
        if kind == "num":
            return ModFuncExpr(self.N, Fraction(val), ())
        if kind == "vec":
            parts = val.lstrip("T ").split("*")
            a = _vec(parts[0], self.N)
            b = _vec(parts[1], self.N) if len(parts) > 1 else None
            if b is not None and (b.a1, b.a2) == (b.a3, b.a4):
                b = None
            return ModFuncExpr(self.N, 0, (TraceTerm(Fraction(1), a, b),))
        if kind == "name":
            if val not in self.env:
                raise KeyError(val)
            return self.env[val]
        raise ValueError(f"unexpected token {val!r}")


def parse_combination(text: str, N: int, env: dict | None = None) -> ModFuncExpr:
    """Parse a linear combination of traces, constants and named functions."""
    return _Comb(text, N, env or {}).parse()


def resolve_generators(texts, N: int, macros: dict | None = None) -> list[ModFuncExpr]:
    """Resolve a generator list whose entries may refer to each other (F1, F2, ...)."""
    env = {}
    for k, v in (macros or {}).items():
        env[k] = parse_combination(v, N, env)
    done: dict[int, ModFuncExpr] = {}
    pending = dict(enumerate(texts, start=1))
    while pending:
        progress = False
        for i in sorted(pending):
            scope = dict(env)
            scope.update({f"F{k}": f for k, f in done.items()})
            try:
                done[i] = parse_combination(pending[i], N, scope)
            except KeyError:
                continue
            del pending[i]
            progress = True
        if not progress:
            raise ValueError(f"unresolvable generator references in {sorted(pending)} for N={N}")
    return [done[i] for i in sorted(done)]


@dataclass
class ReferenceRecord:
    N: int
    generators: list  # expression strings
    macros: dict = field(default_factory=dict)
    equation: str | None = None
    parts: dict = field(default_factory=dict)  # A, B, (C), D or R_num/R_den
    table: str = ""
    worked: dict | None = None

    def functions(self) -> list[ModFuncExpr]:
        return resolve_generators(self.generators, self.N, self.macros)


@lru_cache(maxsize=1)
def reference_data() -> dict:
    with resources.files("x0n").joinpath("data/reference.json").open() as fh:
        return json.load(fh)


def reference_levels() -> list[int]:
    d = reference_data()
    levels = set()
    for key in ("table_genus0", "table_genus1", "table_genus2", "generators", "worked"):
        levels.update(int(n) for n in d[key])
    return sorted(levels)


def reference_errata(N: int | None = None) -> list[dict]:
    """Known misprints in the tables, each with the corrected text and the reason."""
    items = reference_data().get("errata", [])
    return [e for e in items if N is None or e["N"] == N]


def _apply_errata(table: str, N: int, r: dict) -> dict:
    r = json.loads(json.dumps(r))
    for e in reference_errata(N):
        if e["table"] != table:
            continue
        if e["index"] == "merge01":
            F = r["F"]
            joint = "" if F[1].lstrip().startswith("-") else "+"
            r["F"] = [F[0] + joint + F[1]] + F[2:]
            continue
        if e["field"] == "F":
            target = r["F"][e["index"]]
        else:
            target = r[e["field"]]
        if e["printed"] not in target:
            raise ValueError(f"erratum for N={N} does not match the printed text")
        fixed = target.replace(e["printed"], e["corrected"], 1)
        if e["field"] == "F":
            r["F"][e["index"]] = fixed
        else:
            r[e["field"]] = fixed
    return r


def reference_record(N: int, errata: bool = False) -> ReferenceRecord:
    """The printed record for level N; ``errata=True`` applies the known corrections."""
    d = reference_data()
    key = str(N)
    worked = d["worked"].get(key)
    for table in ("table_genus0", "table_genus1", "table_genus2", "generators"):
        r = d[table].get(key)
        if r is None:
            continue
        if errata:
            r = _apply_errata(table, N, r)
        parts = {k: v for k, v in r.items() if k not in ("F", "equation", "macros")}
        return ReferenceRecord(N, list(r["F"]), dict(r.get("macros", {})), r.get("equation"),
                               parts, table, worked)
    if worked is not None:
        return ReferenceRecord(N, list(worked["F"]), {}, worked.get("equation"), {}, "worked", worked)
    raise KeyError(f"no reference record for N={N}")
