"""Minimal equations, relations among F_k, and the representation of J."""
from fractions import Fraction

import pytest

from x0n.jrep import CUSP, JRepError, evaluate_j, find_cusp_killer, j_expansion, j_expansion_at, j_pole_order
from x0n.modcurve import cusps_gamma0, genus0
from x0n.pipeline import PipelineConfig, run
from x0n.poly import Poly
from x0n.relations import (
    XY,
    ReductionError,
    RelationError,
    canonical_equation,
    fvars,
    minimal_equation,
    minimal_equation_shape,
    reduce_to_poly,
    relation_coeffs,
    solve_Hi,
)
from x0n.search import system_from_exprs
from x0n.series import LaurentSeries


def basis(N, texts, prec=60):
    sys_ = system_from_exprs(N, texts)
    P = cusps_gamma0(N)[0]
    return [f.expansion(P, prec) for f in sys_.funcs]


def test_equation_shape():
    assert minimal_equation_shape(1) == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1)]
    assert len(minimal_equation_shape(5)) == sum(7 - j for j in range(6))


def test_minimal_equation_level_11():
    F = basis(11, ["T[2,1,5,1]", "T[2,1,3,1]"])
    eq = minimal_equation(F[0], F[1], 1)
    assert eq.evaluate({"X": F[0], "Y": F[1]}).is_zero()
    assert eq.degree("Y") == 2 and eq.degree("X") == 3
    assert eq == canonical_equation(eq)
    # up to the normalization of the generators this is the reference curve
    assert eq.to_text() == "Y^2 - 5*Y - X^3 + 7*X^2 - 6*X + 18"


def test_minimal_equation_rejects_wrong_poles():
    F = basis(14, ["T[5,1,2,1]", "T[4,1,3,1]*[5,1,2,1]"])
    with pytest.raises(RelationError):
        minimal_equation(F[1], F[0], 1)


def test_canonical_equation_sign_and_content():
    P = Poly.parse("-2Y^2 + 4X^3 - 6", XY)
    assert canonical_equation(P) == Poly.parse("Y^2 - 2X^3 + 3", XY)


@pytest.fixture(scope="module")
def level22():
    res = run(PipelineConfig(22, stop_after="relations"))
    P = cusps_gamma0(22)[0]
    return res, [f.expansion(P, res.precision) for f in res.system.funcs]


def test_relation_rows_vanish(level22):
    res, F = level22
    V = fvars(2)
    row = relation_coeffs(F, 1)
    assert row.kernel_dim == 0
    assert row.as_poly(2).evaluate(dict(zip(V, F))).is_zero()
    with pytest.raises(ValueError):
        relation_coeffs(F, 2)


def test_cramer_solution(level22):
    res, F = level22
    (H,) = solve_Hi([relation_coeffs(F, 1)], 2)
    vals = {"X": F[0], "Y": F[1]}
    assert H.index == 3
    assert (H.Delta.evaluate(vals) * F[2] - H.U.evaluate(vals)).is_zero()
    # Delta is primitive with positive leading term
    assert H.Delta.content() == 1 and H.Delta.sorted_terms()[0][1] > 0


def test_reduce_to_poly(level22):
    res, F = level22
    V = fvars(2)
    target = F[0] * F[2] + F[1] * 3 + 7
    Q, rem = reduce_to_poly(target, F, 2)
    assert rem.is_zero()
    assert (Q.evaluate(dict(zip(V, F))) - target).is_zero()
    lonely = LaurentSeries(F[0].tag, -1, [1], F[0].prec)  # a simple pole alone is a gap at P
    with pytest.raises(ReductionError):
        reduce_to_poly(lonely, F, 2)


@pytest.mark.parametrize("N", [14, 36, 52])
def test_j_at_cusps(N):
    for Q in cusps_gamma0(N):
        s = j_expansion_at(Q, 10)
        assert -s.val == j_pole_order(Q) == N // (Q.D * Q.width)
        assert s.leading_coefficient() == 1


def test_j_expansion_integral_and_744():
    s = j_expansion(5)
    assert s.val == -1 and s[0] == 744 and s[1] == 196884
    with pytest.raises(ValueError):
        j_expansion(-1)


def test_killer_f1_vanishes():
    F_texts = ["T[5,1,2,1]", "T[4,1,3,1]*[5,1,2,1]"]
    sys_ = system_from_exprs(14, F_texts)
    for Q in cusps_gamma0(14)[1:]:
        exps = [f.expansion(Q, 8) for f in sys_.funcs]
        G, order = find_cusp_killer(Q, exps)
        assert order > 0 and G.degree("F2") == 0
        with pytest.raises(ValueError):
            find_cusp_killer(cusps_gamma0(14)[0], exps)
        with pytest.raises(ValueError):
            find_cusp_killer(Q, exps, policy="bogus")


def test_killer_rejects_pole():
    Q = cusps_gamma0(14)[1]
    bad = [LaurentSeries(j_expansion_at(Q, 4).tag, -1, [1], 4)] * 2
    with pytest.raises(JRepError):
        find_cusp_killer(Q, bad)


def test_evaluate_j_genus0_and_errors():
    res = run(PipelineConfig(7, use_reference_generators=True))
    assert evaluate_j(None, res.collapsed, 8) is CUSP
    X = Fraction(3)
    want = Fraction((9 - 9 + 9) * (9 - 33 + 25) ** 3, 3 - 8)
    assert evaluate_j(None, res.collapsed, X) == want
    res14 = run(PipelineConfig(14, use_reference_generators=True))
    with pytest.raises(ValueError):
        evaluate_j(res14.equation, res14.collapsed, (1, 1))  # not on the curve


def test_jrep_json_shape():
    res = run(PipelineConfig(14, use_reference_generators=True))
    obj = res.jrep.to_json_obj()
    assert {k["cusp"]["D"] for k in obj["killers"]} == {2, 7, 14}
    assert all(set(k) == {"cusp", "G", "m", "zero_order"} for k in obj["killers"])
    assert obj["R_N"]["den"] == "(X + 1)^4*X^2*(X - 7)"
    assert genus0(14) == res.g == 1
