"""LaurentSeries: ring laws, precision bookkeeping and JSON."""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from x0n.exact import CycNum
from x0n.series import LaurentSeries, SeriesError, VarTag, int_convolve

TAG = VarTag(14, 1, 1)


def series(tag=TAG):
    coef = st.integers(-50, 50) | st.fractions(min_value=-4, max_value=4, max_denominator=5)
    return st.builds(
        lambda val, cs, extra: LaurentSeries(tag, val, cs, val + len(cs) + extra),
        st.integers(-6, 3),
        st.lists(coef, min_size=1, max_size=12),
        st.integers(0, 3),
    )


def schoolbook(a, b, n):
    out = [0] * n
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < n:
                out[i + j] += x * y
    return out


@given(st.lists(st.integers(-10**30, 10**30), max_size=20), st.lists(st.integers(-10**6, 10**6), max_size=20))
def test_kronecker_matches_schoolbook(a, b):
    n = len(a) + len(b)
    assert int_convolve(a, b, n) == schoolbook(a, b, n)


@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert (a * b).agrees_with(b * a)
    assert ((a + b) * c).agrees_with(a * c + b * c)
    assert ((a * b) * c).agrees_with(a * (b * c))


@given(series())
def test_inverse(a):
    if a.is_zero():
        return
    one = a * a.inverse()
    assert one.val == 0 and one[0] == 1
    assert all(one[e] == 0 for e in range(1, one.prec))


def test_precision_of_product():
    a = LaurentSeries(TAG, -2, [1, 3, 5], 4)  # known for exponents < 4
    b = LaurentSeries(TAG, -1, [2, 0, 1], 6)
    p = a * b
    # error terms: O(q^4) * q^-1 and q^-2 * O(q^6)
    assert p.prec == 3
    assert p.val == -3 and p[-3] == 2


def test_zero_series_convention():
    z = LaurentSeries(TAG, 0, [0, 0, 0], 5)
    assert z.is_zero() and z.val == 5 and z.coeffs == ()
    with pytest.raises((SeriesError, ZeroDivisionError, ValueError)):
        z.inverse()


def test_mismatched_tags():
    a = LaurentSeries(TAG, 0, [1], 5)
    b = LaurentSeries(VarTag(14, 2, 1), 0, [1], 5)
    with pytest.raises(SeriesError):
        a + b


def test_cyclotomic_coefficients_and_json():
    tag = VarTag(14, 2, 1)
    s = LaurentSeries(tag, 0, [-1, 0, CycNum.parse(14, "8*z^2"), CycNum.parse(14, "8*z^3")], 4)
    obj = s.to_json_obj()
    assert obj["coeffs"] == ["-1", "0", "8*z^2", "8*z^3"]
    assert LaurentSeries.from_json(s.to_json()) == s
    assert s.to_text().startswith("-1")


def test_rational_json_roundtrip():
    s = LaurentSeries(TAG, -2, [1, Fraction(-1, 3), 0, 7], 6)
    assert LaurentSeries.from_json_obj(s.to_json_obj()) == s


@given(series(), st.integers(0, 5))
def test_power_is_repeated_product(a, k):
    p = LaurentSeries.constant(1, TAG, 10**6)
    for _ in range(k):
        p = p * a
    assert (a**k).agrees_with(p)
