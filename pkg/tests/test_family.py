import pytest
import argparse

from ppinv.certificate import PermutationCertificate
from ppinv.family import (
    ParameterException,
    PermutationFamily,
    Stopwatch,
    field_for,
    field_from_args,
    get_families,
    run_tasks,
)
from ppinv.gf_core import FieldException


def test_field_for():
    ctx = field_for(9, 2)
    assert (ctx.p, ctx.e, ctx.n) == (3, 2, 2)
    assert ctx.q == 9
    with pytest.raises(FieldException):
        field_for(6, 2)


def test_field_from_args():
    ctx = field_from_args(argparse.Namespace(field="5:1:3", q=None), 3)
    assert (ctx.p, ctx.e, ctx.n) == (5, 1, 3)
    ctx = field_from_args(argparse.Namespace(field="2^2^2", q=None, n=3))
    assert ctx.spec == "2:2:2"
    ctx = field_from_args(argparse.Namespace(field=None, q=3, n=4))
    assert ctx.spec == "3:1:4"
    assert field_from_args(argparse.Namespace(q=9), 2).spec == "3:2:2"
    with pytest.raises(ParameterException, match="n = 3"):
        field_from_args(argparse.Namespace(field="3:1:2", q=None), 3)
    with pytest.raises(FieldException):
        field_from_args(argparse.Namespace(field="3:1", q=None), 2)


def test_field_arguments_are_exclusive():
    parser = argparse.ArgumentParser()
    PermutationFamily.add_field_arguments(parser)
    assert parser.parse_args(["--field", "3:1:2"]).field == "3:1:2"
    assert parser.parse_args(["--q", "3"]).q == 3
    with pytest.raises(SystemExit):
        parser.parse_args(["--q", "3", "--field", "3:1:2"])
    with pytest.raises(SystemExit):
        parser.parse_args([])


def test_run_tasks_serial():
    assert run_tasks(abs, range(-2, 3), jobs=1) == [2, 1, 0, 1, 2]
    assert run_tasks(abs, [], jobs=1) == []


def test_run_tasks_keeps_order_in_a_pool():
    assert run_tasks(abs, range(-20, 20), jobs=2) == [abs(i) for i in range(-20, 20)]


def test_run_tasks_uses_settings(monkeypatch):
    monkeypatch.setenv("PPINV_JOBS", "1")
    assert run_tasks(abs, [-3]) == [3]


def test_stopwatch():
    cert = PermutationCertificate(family="x", field="3:1:2", parameters={})
    assert Stopwatch().stop(cert).wall_time >= 0


def test_registry():
    families = get_families()
    assert [f.identifier for f in families] == ["quad", "cpp", "aml"]
    assert [f.sweepable for f in families] == [True, False, True]
    assert all(issubclass(f, PermutationFamily) for f in families)
    assert all(f.verbose_name for f in families)


def test_families_declare_arguments():
    for family in get_families():
        parser = argparse.ArgumentParser()
        family.add_arguments(parser)
        assert any(action.dest == "q" for action in parser._actions)


def test_base_class_is_abstract():
    with pytest.raises(NotImplementedError):
        PermutationFamily.from_args(None)
    with pytest.raises(NotImplementedError):
        PermutationFamily(None).certify()


def test_parameter_exception_is_value_error():
    assert issubclass(ParameterException, ValueError)
