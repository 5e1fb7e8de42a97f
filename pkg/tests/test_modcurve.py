"""Cusps, genus and orders of W_a."""
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from x0n.exact import euler_phi
from x0n.modcurve import (
    UnsupportedLevel,
    WVector,
    braces_mu,
    cusp_class_of,
    cusps_gamma0,
    cusps_gamma1,
    divisors,
    gamma1_cusp_count,
    genus0,
    trace_order_bound,
    units_mod_pm,
    w_order,
)


def genus_brute(N):
    """Riemann-Hurwitz with every ingredient counted directly mod N."""
    pairs = sum(1 for c in range(N) for d in range(N) if gcd(gcd(c, d), N) == 1)
    mu = pairs // euler_phi(N)
    nu2 = sum(1 for x in range(N) if (x * x + 1) % N == 0)
    nu3 = sum(1 for x in range(N) if (x * x + x + 1) % N == 0)
    cusps = sum(euler_phi(gcd(d, N // d)) for d in divisors(N))
    twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps
    assert twelve_g % 12 == 0
    return twelve_g // 12


# genus of X_0(N) for 5 <= N <= 52, as tabulated in the standard references
KNOWN = {5: 0, 6: 0, 7: 0, 8: 0, 9: 0, 10: 0, 11: 1, 12: 0, 13: 0, 14: 1, 15: 1, 16: 0, 17: 1, 18: 0,
         19: 1, 20: 1, 21: 1, 22: 2, 23: 2, 24: 1, 25: 0, 26: 2, 27: 1, 28: 2, 29: 2, 30: 3, 31: 2,
         32: 1, 33: 3, 34: 3, 35: 3, 36: 1, 37: 2, 38: 4, 39: 3, 40: 3, 41: 3, 42: 5, 43: 3, 44: 4,
         45: 3, 46: 5, 47: 4, 48: 3, 49: 1, 50: 2, 51: 5, 52: 5}


@pytest.mark.parametrize("N", sorted(KNOWN))
def test_genus_table(N):
    assert genus0(N) == KNOWN[N] == genus_brute(N)


@pytest.mark.parametrize("N", [60, 64, 97, 100, 120, 144])
def test_genus_larger_levels(N):
    assert genus0(N) == genus_brute(N)


@pytest.mark.parametrize("N", range(5, 60))
def test_cusp_counts(N):
    cs = cusps_gamma0(N)
    assert len(cs) == sum(euler_phi(gcd(d, N // d)) for d in divisors(N))
    assert len(cusps_gamma1(N)) == gamma1_cusp_count(N)
    assert cs[0].D == 1 and cs[0].u == 1  # the cusp at infinity comes first
    for Q in cs:
        assert Q.width == gcd(Q.D, N // Q.D)
        assert gcd(Q.u, Q.D) == 1
        assert Q.D == 1 or (Q.u * Q.d) % Q.D == 1


@pytest.mark.parametrize("N", [12, 14, 36, 52])
def test_every_gamma1_cusp_has_a_class(N):
    classes = {cusp_class_of(c.u, c.t, N) for c in cusps_gamma1(N)}
    assert classes == set(cusps_gamma0(N))


def test_level_bounds():
    with pytest.raises(UnsupportedLevel):
        cusps_gamma0(4)
    with pytest.raises(ValueError):
        genus0(0)


def test_w_vector_validation():
    assert WVector(5, 1, 2, 1).is_valid(14)
    assert not WVector(5, 9, 2, 1).is_valid(14)  # 9 = -5 mod 14
    assert not WVector(14, 1, 2, 1).is_valid(14)
    with pytest.raises(ValueError):
        WVector.of([1, 2, 3], 14)
    assert WVector.of([19, 15, 16, 15], 14) == WVector(5, 1, 2, 1)


@given(st.integers(-200, 200), st.sampled_from([(14, 1), (14, 2), (14, 7), (52, 4), (36, 6)]))
def test_braces_mu(n, DN):
    N, D = DN
    M = N // D
    r, mu = braces_mu(n, D, N)
    assert 0 <= 2 * r <= M
    assert (n - mu * r) % M == 0


def test_w_order_scalings_at_infinity():
    # min({a1},{a2}) - min({a3},{a4}) with {x} the distance to 14Z
    a = (5, 1, 2, 1)
    assert [w_order([s * x for x in a], (1, 1), 14) for s in (1, 3, 5)] == [0, -2, -1]


def test_trace_bound_example():
    # the trace of W_[5,1,2,1] has a double pole at infinity at level 14
    assert trace_order_bound((5, 1, 2, 1), None, 1, 14) == -2
    assert units_mod_pm(14) == [1, 3, 5]
