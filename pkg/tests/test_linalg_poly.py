"""Fraction-free elimination and the multivariate polynomial helper."""
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from x0n.linalg import LinearSystemError, det, nullspace, rank, solve
from x0n.poly import Poly, PolyParseError, poly_det

XY = ("X", "Y")
small = st.integers(-6, 6)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_permutation_expansion(M):
    from itertools import permutations

    n = len(M)
    ref = 0
    for p in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        prod = 1
        for i in range(n):
            prod *= M[i][p[i]]
        ref += sign * prod
    assert det(M) == ref


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=5))
def test_nullspace_vectors_are_kernel(M):
    ker = nullspace(M)
    assert len(ker) == 4 - rank(M)
    for v in ker:
        assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in M)


def test_solve_unique_and_errors():
    assert solve([[2, 1], [1, 3], [3, 4]], [3, 4, 7]) == [1, 1]
    with pytest.raises(LinearSystemError) as exc:
        solve([[1, 1], [2, 2]], [1, 3])
    assert exc.value.kind == "inconsistent"
    with pytest.raises(LinearSystemError) as exc:
        solve([[1, 1], [2, 2]], [1, 2])
    assert exc.value.kind == "underdetermined" and exc.value.kernel_dim == 1
    x = solve([[1, 1], [2, 2]], [1, 2], require_unique=False)
    assert x[0] + x[1] == 1


def test_poly_parse_and_print():
    P = Poly.parse("(X+1)^4X^2(X-7)", XY)
    assert P.degree("X") == 7
    assert P.evaluate({"X": 7, "Y": 0}) == 0
    Q = Poly.parse("Y^2-X^3+YX-6X^2-Y-18X-12", XY)
    assert Poly.parse(Q.to_text(), XY) == Q
    assert Q.to_text() == "Y^2 + X*Y - Y - X^3 - 6*X^2 - 18*X - 12"
    with pytest.raises(PolyParseError):
        Poly.parse("X^^2", XY)


def test_poly_subscript_vars():
    V = ("F1", "F2", "F3")
    P = Poly.parse("-28F1+7F3+6461/3", V)
    assert P.terms[(0, 0, 1)] == 7 and P.constant_term() == Fraction(6461, 3)
    assert Poly.parse(P.to_text("sub"), V) == P


def test_poly_det_2x2():
    X = Poly.var(XY, "X")
    Y = Poly.var(XY, "Y")
    assert poly_det([[X, Y], [Y, X]]) == X * X - Y * Y


def test_monic_and_substitute():
    P = Poly.parse("2Y^2 + 4X", XY)
    assert P.monic_in("Y") == Poly.parse("Y^2 + 2X", XY)
    X = Poly.var(XY, "X")
    assert P.substitute("X", X + 1) == Poly.parse("2Y^2 + 4X + 4", XY)
