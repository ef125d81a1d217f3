import pytest
import json

from ppinv.certificate import (
    PermutationCertificate,
    Verdict,
    VerificationException,
    dumps,
    render,
)
from ppinv.linearized import LinearizedPoly


def make_cert(**kwargs):
    defaults = dict(
        family="quad",
        field="3:1:2",
        parameters={"k": 2},
        verdict=Verdict.PERMUTATION,
        oracle=Verdict.PERMUTATION,
    )
    defaults.update(kwargs)
    return PermutationCertificate(**defaults)


def test_verdict_of():
    assert Verdict.of(True) is Verdict.PERMUTATION
    assert Verdict.of(False) is Verdict.NOT_PERMUTATION
    assert Verdict.NOT_PERMUTATION.value == "NOT"


def test_render(f9):
    x = f9.element([1, 2])
    assert render(x) == [1, 2]
    assert render({"a": x, 1: [x, None]}) == {"a": [1, 2], "1": [[1, 2], None]}
    assert render(Verdict.PERMUTATION) == "PERMUTATION"
    assert render(LinearizedPoly(f9, [1, 1])) == [[1, 0], [1, 0]]
    assert render((True, 3)) == [True, 3]


def test_to_dict_without_timing(f9):
    cert = make_cert(derived={"d": f9.g}, wall_time=0.5)
    d = cert.to_dict()
    assert "wall_time" not in d
    assert d["derived"] == {"d": [1, 1]}
    assert d["verdict"] == d["oracle"] == "PERMUTATION"
    assert cert.to_dict(with_timing=True)["wall_time"] == 0.5


def test_for_field_records_construction(f9):
    cert = PermutationCertificate.for_field(f9, family="quad", parameters={"k": 2})
    assert cert.field == "3:1:2"
    d = cert.to_dict()
    assert d["modulus"] == [1, 0, 1]
    assert d["generator"] == [1, 1]
    assert list(d).index("modulus") == list(d).index("field") + 1
    assert make_cert().to_dict()["modulus"] is None


def test_dumps_is_canonical():
    text = dumps({"b": 1, "a": [1, 2]})
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [1, 2], "b": 1}


def test_check_passes():
    cert = make_cert(identities={"x": True}, inverse_valid=True)
    assert cert.consistent
    assert cert.check() is cert


@pytest.mark.parametrize(
    "kwargs,reason",
    [
        ({"oracle": Verdict.NOT_PERMUTATION}, "criterion and oracle disagree"),
        ({"inverse_valid": False}, "closed-form inverse failed validation"),
        ({"identities": {"a": True, "b": False}}, "identity failed: b"),
    ],
)
def test_check_raises(kwargs, reason):
    cert = make_cert(**kwargs)
    assert not cert.consistent
    with pytest.raises(VerificationException) as excinfo:
        cert.check()
    assert excinfo.value.certificate["reason"] == reason
    assert excinfo.value.certificate["family"] == "quad"
    assert str(excinfo.value) == reason


def test_exception_without_reason():
    e = VerificationException({"x": 1})
    assert str(e) == "verification failed"
    assert e.certificate == {"x": 1}
