import pytest
import json

from ppinv import cli, family_quadratic
from ppinv.certificate import Verdict


def run_json(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    assert code == 0, err
    return json.loads(out)


def test_verify_quadratic_permutation(capsys):
    cert = run_json(
        capsys, "verify", "quad", "--q", "3", "--a", "0", "--b", "1", "--k", "2"
    )
    assert cert["family"] == "quad"
    assert cert["verdict"] == cert["oracle"] == "PERMUTATION"
    assert cert["inverse_valid"] is True
    assert cert["inverse"]["variant"] == "x-T"
    assert "wall_time" not in cert


def test_verify_quadratic_not_permutation(capsys):
    cert = run_json(
        capsys, "verify", "quad", "--q", "3", "--a", "1", "--b", "1", "--k", "2"
    )
    assert cert["verdict"] == cert["oracle"] == "NOT"
    assert cert["criterion"]["b_neq_aq"] is False
    assert cert["inverse_valid"] is None


def test_verify_quadratic_case_b(capsys):
    cert = run_json(
        capsys, "verify", "quad", "--q", "3", "--a", "1,1", "--k", "3", "--case", "B"
    )
    assert cert["parameters"]["case"] == "B"
    assert cert["verdict"] == "PERMUTATION"
    assert cert["identities"]["h_inverse"] is True


def test_verify_timings(capsys):
    cert = run_json(
        capsys,
        "verify",
        "quad",
        "--q",
        "3",
        "--a",
        "0",
        "--b",
        "1",
        "--k",
        "2",
        "--timings",
    )
    assert cert["wall_time"] >= 0


def test_verify_cubic(capsys):
    cert = run_json(capsys, "verify", "cpp", "--q", "3")
    assert cert["family"] == "cpp"
    assert cert["verdict"] == cert["oracle"] == "PERMUTATION"
    assert cert["inverse_valid"] is True


def test_verify_aml(capsys):
    cert = run_json(
        capsys, "verify", "aml", "--q", "3", "--b", "2", "--m", "1", "--L", "1", "1"
    )
    assert cert["verdict"] == cert["oracle"] == "PERMUTATION"
    assert cert["criterion"] == {
        "gcd_m_q_minus_1": True,
        "rank_D_n_minus_1": True,
        "s_nonzero": True,
        "det_B_nonzero": True,
    }
    assert cert["derived"]["alpha"] == [[1, 0], [2, 0]]


def test_verify_aml_not_permutation(capsys):
    cert = run_json(
        capsys, "verify", "aml", "--q", "3", "--b", "1", "--m", "1", "--L", "1", "1"
    )
    assert cert["verdict"] == "NOT"
    assert cert["derived"]["witness"] == [[1, 0], [0, 0]]


def test_verify_is_deterministic(capsys):
    argv = ("verify", "aml", "--q", "3", "--b", "2", "--m", "1", "--L", "1", "1")
    assert cli.run(list(argv)) == 0
    first = capsys.readouterr().out
    assert cli.run(list(argv)) == 0
    assert capsys.readouterr().out == first


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "quad", "--q", "3", "--k", "2", "--bogus"],
        ["verify", "quad", "--q", "6", "--b", "1", "--k", "2"],
        ["verify", "quad", "--q", "3", "--k", "2"],
        ["verify", "quad", "--q", "3", "--a", "0,1", "--b", "0", "--k", "2"],
        ["verify", "quad", "--q", "3", "--b", "1", "--k", "3"],
        ["verify", "cpp", "--q", "4"],
        ["verify", "aml", "--q", "3", "--L", "1", "0"],
        ["verify", "aml", "--q", "3", "--b", "1,1", "--L", "1", "1"],
        ["invert", "quad", "--q", "3", "--a", "1", "--b", "1", "--k", "2"],
        ["sweep", "cpp", "--q", "3"],
        [],
    ],
)
def test_usage_and_parameter_errors(capsys, argv):
    assert cli.run(argv) == 1
    assert capsys.readouterr().err


def test_invert(capsys):
    result = run_json(
        capsys,
        "invert",
        "quad",
        "--q",
        "3",
        "--b",
        "1",
        "--k",
        "2",
        "--dense",
    )
    assert result["field"] == "3:1:2"
    assert len(result["inverse"]) == 9
    assert result["inverse"]["0"] == [0, 0]
    assert result["dense"]


def test_export_sbox_to_file(capsys, tmp_path):
    out = tmp_path / "sbox.txt"
    argv = ["export", "sbox", "aml", "--q", "3", "--b", "2", "--L", "1", "1"]
    result = run_json(capsys, *argv, "--out", str(out))
    assert result["entries"] == 9
    assert result["bijective"] is True
    lines = out.read_text().splitlines()
    assert len(lines) == 9
    assert sorted(lines) == [str(i) for i in range(9)]


def test_export_inverse_sbox_to_stdout(capsys):
    assert cli.run(["export", "sbox", "cpp", "--q", "3", "--inverse"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 27
    assert len(set(lines)) == 27
    assert lines[0] == "00"


def test_criterion_disagreement_exits_with_2(capsys, monkeypatch):
    original = family_quadratic.criterion

    def flipped(params):
        cert = original(params)
        cert.verdict = (
            Verdict.NOT_PERMUTATION
            if cert.verdict is Verdict.PERMUTATION
            else Verdict.PERMUTATION
        )
        return cert

    monkeypatch.setattr(family_quadratic, "criterion", flipped)
    code = cli.run(["verify", "quad", "--q", "3", "--a", "0", "--b", "1", "--k", "2"])
    assert code == 2
    out, err = capsys.readouterr()
    assert out == ""
    assert "criterion and oracle disagree" in err


def test_quadratic_sweep(capsys):
    result = run_json(capsys, "sweep", "quad", "--q", "3", "--k-max", "3")
    assert result["failures"] == 0
    assert result["k_range"] == [2, 3]


def test_aml_sweep_sampled(capsys):
    result = run_json(
        capsys, "sweep", "aml", "--q", "3", "--n", "3", "--samples", "10", "--seed", "1"
    )
    assert result["summary"]["instances"] == 10
    assert result["failures"] == 0


@pytest.mark.slow
def test_selftest(capsys):
    result = run_json(capsys, "selftest", "--samples", "20", "--seed", "3")
    assert result["passed"] is True
    names = {record["check"] for record in result["checks"]}
    assert {"field_invariants", "quad_sweep", "cpp_certificate", "aml_sweep"} <= names


@pytest.mark.slow
def test_selftest_output_is_reproducible(capsys):
    argv = ["selftest", "--samples", "10", "--seed", "2"]
    assert cli.run(argv) == 0
    first = capsys.readouterr().out
    assert cli.run(argv) == 0
    assert capsys.readouterr().out == first
    names = [record["check"] for record in json.loads(first)["checks"]]
    assert "field_arithmetic" in names
    assert "poly_eval" in names


def test_verify_with_field_spec(capsys):
    cert = run_json(capsys, "verify", "cpp", "--field", "3:1:3")
    assert cert["field"] == "3:1:3"
    assert cert["modulus"] == [1, 2, 0, 1]
    assert cert["verdict"] == "PERMUTATION"

    cert = run_json(
        capsys, "verify", "quad", "--field", "3^1^2", "--a", "0", "--b", "1", "--k", "2"
    )
    assert cert["field"] == "3:1:2"
    assert cert["modulus"] == [1, 0, 1]
    assert cert["generator"] == [1, 1]
    assert cert["verdict"] == "PERMUTATION"


def test_verify_aml_with_field_spec(capsys):
    cert = run_json(
        capsys, "verify", "aml", "--field", "3:1:2", "--b", "2", "--L", "1", "1"
    )
    assert cert["field"] == "3:1:2"
    assert cert["verdict"] == cert["oracle"] == "PERMUTATION"


def test_sweep_records_modulus(capsys):
    result = run_json(capsys, "sweep", "quad", "--field", "3:1:2", "--k-max", "2")
    assert result["modulus"] == [1, 0, 1]


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "cpp", "--field", "3:1:2"],
        ["verify", "quad", "--field", "3:1:3", "--b", "1", "--k", "2"],
        ["verify", "cpp", "--q", "3", "--field", "3:1:3"],
        ["verify", "cpp", "--field", "6:1:3"],
        ["verify", "cpp"],
    ],
)
def test_field_spec_errors(capsys, argv):
    assert cli.run(argv) == 1
    assert capsys.readouterr().err


def test_verify_quadratic_infers_case_b(capsys):
    cert = run_json(
        capsys, "verify", "quad", "--q", "3", "--a", "1", "--b", "1", "--k", "3"
    )
    assert cert["parameters"]["case"] == "B"
    assert cert["verdict"] == cert["oracle"] == "PERMUTATION"
