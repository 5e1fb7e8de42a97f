"""Generator search, system checks and the bundled reference tables."""
import json

import pytest

from x0n.corpus import (
    parse_combination,
    reference_data,
    reference_errata,
    reference_levels,
    reference_record,
    resolve_generators,
)
from x0n.modcurve import cusps_gamma0, genus0
from x0n.pipeline import PipelineConfig, load_generators
from x0n.poly import Poly
from x0n.relations import XY, fvars
from x0n.search import (
    GeneratorSystem,
    SearchBounds,
    candidate_pool,
    load_system,
    save_system,
    search_generators,
    system_from_exprs,
    verify_system,
)
from x0n.weier import parse_expr


def test_pool_bounds():
    N, g = 14, 1
    pool = candidate_pool(N)
    for e in pool:
        assert e.terms
        assert -(2 * g + 1 + 2 * g) <= e.order_bound(1) <= -(g + 1)
        for Q in cusps_gamma0(N)[1:]:
            assert e.order_bound(Q.D) >= -Q.width
        for t in e.terms:
            for v in t.vectors():
                assert v.is_valid(N)
                # W_a = 1 when (a3, a4) repeats (a1, a2)
                assert (v.a1, v.a2) != (v.a3, v.a4)


def test_pool_contains_reference_generators():
    # the pool keeps one canonical vector per lambda-orbit, so compare functions
    P = cusps_gamma0(14)[0]
    have = {e.expansion(P, 12) for e in candidate_pool(14)}
    for text in ("T[5,1,2,1]", "T[4,1,3,1]*[5,1,2,1]"):
        assert parse_expr(text, 14).expansion(P, 12) in have


def test_empty_pool_reports_bounds():
    from x0n.search import SearchError

    with pytest.raises(SearchError, match="bounds"):
        candidate_pool(14, SearchBounds(max_entry=1))


def test_search_is_deterministic():
    a = search_generators(22)
    b = search_generators(22)
    assert [f.to_text() for f in a.funcs] == [f.to_text() for f in b.funcs]
    assert a.provenance == "searched"


@pytest.mark.parametrize("N", [6, 11, 17, 26, 33])
def test_search_valid(N):
    s = search_generators(N)
    assert verify_system(s) == []
    assert len(s.funcs) == genus0(N) + 1
    # searched generators have zero constant term at <1/1>
    P = cusps_gamma0(N)[0]
    assert all(f.expansion(P, 1)[0] == 0 for f in s.funcs)


def test_verify_system_flags_problems():
    good = system_from_exprs(14, ["T[5,1,2,1]", "T[4,1,3,1]*[5,1,2,1]"])
    assert verify_system(good) == []
    scaled = GeneratorSystem(14, 1, [good.funcs[0].scale(2), good.funcs[1]])
    assert any(p.startswith("normalization") for p in verify_system(scaled))
    swapped = GeneratorSystem(14, 1, [good.funcs[1], good.funcs[0]])
    assert any(p.startswith("pole order") for p in verify_system(swapped))
    wrong_level = GeneratorSystem(15, 1, good.funcs)
    assert any(p.startswith("level") for p in verify_system(wrong_level))
    short = GeneratorSystem(14, 1, good.funcs[:1])
    assert any(p.startswith("count") for p in verify_system(short))
    # a pole at <1/2>: the reference's misprinted N=38 generator has one
    bad38 = reference_record(38).functions()
    sys38 = system_from_exprs(38, bad38)
    assert any(p.startswith("regularity") for p in verify_system(sys38))


def test_save_load_roundtrip(tmp_path):
    s = search_generators(20)
    path = tmp_path / "gens.json"
    save_system(s, str(path))
    obj = json.loads(path.read_text())
    assert obj["N"] == 20 and len(obj["functions"]) == 2
    t = load_system(str(path))
    assert [f.key() for f in t.funcs] == [f.key() for f in s.funcs]
    assert verify_system(t) == []


def test_bounds_json():
    b = SearchBounds(max_terms=1)
    assert b.to_json_obj()["max_terms"] == 1


# -- reference tables ----------------------------------------------------------------

def test_levels():
    levels = reference_levels()
    assert {6, 10, 11, 14, 22, 52} <= set(levels)


@pytest.mark.parametrize("N", reference_levels())
def test_every_record_parses(N):
    r = reference_record(N)
    funcs = r.functions()
    assert all(f.level == N for f in funcs)
    if r.equation:
        Poly.parse(r.equation, fvars(genus0(N)) if N == 52 else XY)
    for key, text in r.parts.items():
        if isinstance(text, str) and "X" in text:
            Poly.parse(text, XY)


@pytest.mark.parametrize("N", sorted({e["N"] for e in reference_errata()}))
def test_errata_apply_and_fix(N):
    fixed = reference_record(N, errata=True)
    assert fixed != reference_record(N)
    cfg = PipelineConfig(N, use_reference_generators=True, apply_errata=True)
    assert verify_system(load_generators(cfg)) == []


def test_errata_records_are_complete():
    for e in reference_errata():
        assert e["reason"]
        assert e["index"] == "merge01" or e["printed"] != e["corrected"]


def test_parse_combination_references():
    f1, f2 = resolve_generators(["F2 - 3", "2+(1/2)[6,1,3,1]"], 16)
    assert f1.constant == f2.constant - 3
    with pytest.raises(ValueError):
        resolve_generators(["F2", "F1"], 16)
    with pytest.raises(ValueError):
        parse_combination("[6,1,3,1]*[7,1,2,1]*[5,1,2,1]", 16)


def test_reference_data_is_cached():
    assert reference_data() is reference_data()
