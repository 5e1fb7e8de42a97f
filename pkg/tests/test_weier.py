"""Expansions of W_a and traces, against an independent theta-function oracle.

The oracle evaluates p(z; 1, tau) through Jacobi theta functions (mpmath),
forms the trace numerically at B(u,D) tau, and compares with the exact
series summed at q_D = exp(2 pi i tau D / N).
"""
from fractions import Fraction
from math import gcd

import mpmath as mp
import pytest

from x0n.exact import CycNum
from x0n.modcurve import WVector, cusps_gamma0
from x0n.weier import ModFuncExpr, TraceTerm, parse_expr, w_expansion

mp.mp.dps = 30


def wp_diff(z1, z2, tau):
    q = mp.exp(1j * mp.pi * tau)
    c = (mp.pi * mp.jtheta(2, 0, q) * mp.jtheta(3, 0, q)) ** 2

    def f(z):
        return (mp.jtheta(4, mp.pi * z, q) / mp.jtheta(1, mp.pi * z, q)) ** 2

    return c * (f(z1) - f(z2))


def W_num(a, tau, N):
    return wp_diff(mp.mpf(a[0]) / N, mp.mpf(a[1]) / N, tau) / wp_diff(mp.mpf(a[2]) / N, mp.mpf(a[3]) / N, tau)


def T_num(a, b, tau, N):
    total = 0
    for lam in range(1, N // 2 + 1):
        if gcd(lam, N) != 1:
            continue
        t = W_num([lam * x % N for x in a], tau, N)
        if b:
            t *= W_num([lam * x % N for x in b], tau, N)
        total += t
    return total


def series_num(s, q):
    out = 0
    for e, c in s.terms():
        out += (c.to_complex() if isinstance(c, CycNum) else complex(c)) * q**e
    return out


def at_cusp(s, f_num, Q, N):
    """Compare series s for f at Q with the numeric f(B tau) at a point with |q_D| = e^-3."""
    tau = mp.mpc(0.17, mp.mpf(N) / (2 * mp.pi * Q.D) * 1.5)
    q = mp.exp(2j * mp.pi * tau * Q.D * s.tag.step / N)
    arg = (Q.u * tau + Q.c) / (Q.D * tau + Q.d)
    v = f_num(arg)
    return abs(v - series_num(s, q)) / max(1, abs(v))


CASES = [
    (11, (2, 1, 3, 1), None),
    (14, (5, 1, 2, 1), None),
    (14, (4, 1, 3, 1), (5, 1, 2, 1)),
    (21, (5, 1, 2, 1), None),
    (36, (5, 1, 2, 1), (7, 1, 2, 1)),
    (52, (5, 1, 2, 1), None),
]


@pytest.mark.parametrize("N,a,b", CASES)
def test_trace_matches_theta_oracle(N, a, b):
    e = ModFuncExpr(N, 0, (TraceTerm(1, WVector(*a), WVector(*b) if b else None),))
    for Q in cusps_gamma0(N):
        s = e.expansion(Q, 40)
        err = at_cusp(s, lambda t: T_num(a, b, t, N), Q, N)
        assert err < 1e-10, f"{Q}: relative error {err}"


@pytest.mark.parametrize("N,a", [(14, (5, 1, 2, 1)), (15, (2, 1, 4, 1)), (36, (5, 1, 7, 1))])
def test_single_quotient_matches_theta_oracle(N, a):
    for Q in cusps_gamma0(N):
        s = w_expansion(a, Q, 30)
        err = at_cusp(s, lambda t: W_num(a, t, N), Q, N)
        assert err < 1e-10, f"{Q}: relative error {err}"


def test_precision_is_consistent():
    e = parse_expr("T[4,1,3,1]*[5,1,2,1]", 14)
    for Q in cusps_gamma0(14):
        lo, hi = e.expansion(Q, 12), e.expansion(Q, 30)
        assert lo.agrees_with(hi)
        assert hi.truncate(12) == lo


def test_parse_expr_forms():
    a = parse_expr("-3 + T[5,1,2,1]", 14)
    assert a.constant == -3 and len(a.terms) == 1
    b = parse_expr("2*T[4,1,3,1]*[5,1,2,1] - 1/2*[5,1,2,1]", 14)
    assert [t.coeff for t in b.terms] == [2, Fraction(-1, 2)]
    assert parse_expr(b.to_text(), 14) == b
    # a trivial second factor [x,y,x,y] is W = 1
    assert parse_expr("T[5,1,2,1]*[3,2,3,2]", 14) == parse_expr("T[5,1,2,1]", 14)
    for bad in ("", "T[5,1,2]", "T[5,1,2,1] +", "2 3"):
        with pytest.raises(ValueError):
            parse_expr(bad, 14)


def test_invalid_vector_rejected():
    with pytest.raises(ValueError):
        parse_expr("T[5,9,2,1]", 14)


def test_linear_combinations():
    f = parse_expr("T[5,1,2,1]", 14)
    P = cusps_gamma0(14)[0]
    s = f.expansion(P, 10)
    assert (f.scale(3) - f).expansion(P, 10) == s.scale(2)
    assert (f + 5).expansion(P, 10) == s + 5
