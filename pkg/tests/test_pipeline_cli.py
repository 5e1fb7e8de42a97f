"""End-to-end pipeline runs against the reference tables, and the CLI."""
import json

import pytest

from x0n import cli
from x0n.pipeline import PipelineConfig, PipelineError, run, verify_against_reference

AS_PRINTED = [6, 7, 8, 9, 11, 12, 13, 14, 15, 17, 18, 19, 20, 22, 24, 25, 36]
NEED_ERRATA = [10, 16, 21, 23, 26, 29]
UNRESOLVED = [28, 31, 32]  # printed equation and printed R_N contradict each other


def failures(N, errata):
    res = run(PipelineConfig(N, use_reference_generators=True, apply_errata=errata))
    return [d.item for d in verify_against_reference(res, errata=errata) if not d.ok]


@pytest.mark.parametrize("N", AS_PRINTED)
def test_reference_levels_as_printed(N):
    assert failures(N, False) == []


@pytest.mark.parametrize("N", NEED_ERRATA)
def test_reference_levels_with_errata(N):
    assert failures(N, False) != []
    assert failures(N, True) == []


@pytest.mark.parametrize("N", UNRESOLVED)
def test_unresolved_levels_only_equation_differs(N):
    assert failures(N, True) == ["equation"]


@pytest.mark.parametrize("N", [38, 39, 46])
def test_printed_generator_tables_rejected(N):
    with pytest.raises(PipelineError) as exc:
        run(PipelineConfig(N, use_reference_generators=True, stop_after="generators"))
    assert exc.value.stage == "generators"
    res = run(PipelineConfig(N, use_reference_generators=True, apply_errata=True, stop_after="generators"))
    assert len(res.system.funcs) == res.g + 1


@pytest.mark.parametrize("N", [15, 26])
def test_precision_monotone(N):
    a = run(PipelineConfig(N))
    b = run(PipelineConfig(N, precision_guard=40))
    assert b.precision > a.precision
    assert a.equation == b.equation and a.jrep.P_N == b.jrep.P_N


def test_searched_pipeline_json():
    res = run(PipelineConfig(23))
    obj = res.to_json_obj()
    assert obj["provenance"] == "searched" and obj["g"] == 2
    assert obj["relation_kernel_dims"] == [0]
    assert set(obj["U"]) == {"U3"}
    assert "R_N" in obj["jrep"]
    json.dumps(obj)


def test_genus0_has_no_equation():
    res = run(PipelineConfig(9))
    assert res.equation is None and res.collapsed is not None


def test_config_checks():
    with pytest.raises(ValueError):
        PipelineConfig(14, precision_guard=5)


# -- CLI -----------------------------------------------------------------------------

def call(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_genus_and_cusps(capsys):
    assert call(capsys, "genus", "52")[:2] == (0, "5\n")
    code, out, _ = call(capsys, "cusps", "14", "--json")
    assert code == 0 and [c["D"] for c in json.loads(out)] == [1, 2, 7, 14]


def test_cli_order(capsys):
    code, out, _ = call(capsys, "order", "14", "--vec", "1,3,6,3", "--cusp", "1,1")
    assert (code, out.strip()) == (0, "-2")


def test_cli_expand_text(capsys):
    code, out, _ = call(capsys, "expand", "14", "--expr", "T[5,1,2,1]", "--prec", "3", "--normalize")
    assert code == 0 and out.strip().startswith("q^-2 + q^-1")


def test_cli_equation(capsys):
    code, out, _ = call(capsys, "equation", "11", "--use-reference-generators")
    assert (code, out.strip()) == (0, "Y^2 - 5*Y - X^3 + 7*X^2 - 6*X + 18")
    code, _, err = call(capsys, "equation", "13")
    assert code == 1 and "genus 0" in err


def test_cli_eval(capsys):
    assert call(capsys, "eval", "14", "--use-reference-generators", "--point", "0,4")[1].strip() == "-3375"
    assert call(capsys, "eval", "14", "--use-reference-generators", "--point=-1,1")[1].strip() == "cusp"
    assert call(capsys, "eval", "7", "--use-reference-generators", "--point", "8")[1].strip() == "cusp"
    code, _, err = call(capsys, "eval", "14", "--use-reference-generators", "--point", "1,1")
    assert code == 1 and err.startswith("error")


def test_cli_verify_exit_codes(capsys):
    assert call(capsys, "verify", "14")[0] == 0
    code, out, _ = call(capsys, "verify", "10")
    assert code == 2 and "DIFF R_N" in out and "X_ref" not in out  # no shift reconciles num and den
    assert call(capsys, "verify", "10", "--apply-errata")[0] == 0
    assert call(capsys, "verify", "27")[0] == 1  # no reference record


def test_cli_generators_and_jrep(capsys, tmp_path):
    gens = tmp_path / "g.json"
    code, out, _ = call(capsys, "generators", "22", "--save", str(gens))
    assert code == 0 and json.loads(out)["problems"] == []
    target = tmp_path / "j.json"
    code, out, _ = call(capsys, "jrep", "22", "--generators", str(gens), "--output", str(target))
    assert code == 0
    obj = json.loads(target.read_text())
    assert obj == json.loads(out)
    assert obj["N"] == 22 and obj["g"] == 2 and "R_N" in obj


def test_cli_bad_input(capsys):
    assert call(capsys, "expand", "14", "--expr", "T[5,9,2,1]")[0] == 1
    assert call(capsys, "genus", "3")[0] == 0
    assert call(capsys, "cusps", "3")[0] == 1
    with pytest.raises(SystemExit):
        cli.main(["order", "14", "--vec", "1,2,3,4", "--cusp", "1"])
