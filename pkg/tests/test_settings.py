import pytest

from ppinv.settings import Settings, settings


def test_defaults():
    s = Settings(environ={})
    assert s.max_field == 2**22
    assert s.jobs == 1
    assert s.samples == 1000
    assert s.seed == 0


def test_typed_lookup():
    s = Settings(environ={"PPINV_JOBS": "4", "PPINV_SEED": "17"})
    assert s.jobs == 4
    assert s.seed == 17
    assert s.get("jobs") == "4"
    assert s.get("jobs", as_type=int) == 4


def test_bool_values():
    s = Settings(environ={"PPINV_VERBOSE": "Yes", "PPINV_QUIET": "0"})
    assert s.get("verbose", as_type=bool) is True
    assert s.get("quiet", as_type=bool) is False


def test_empty_value_falls_back():
    s = Settings(environ={"PPINV_SAMPLES": ""})
    assert s.samples == 1000
    assert s.get("unknown", default=3) == 3


def test_invalid_value():
    s = Settings(environ={"PPINV_MAX_FIELD": "lots"})
    with pytest.raises(ValueError, match="PPINV_MAX_FIELD"):
        s.max_field


def test_unknown_attribute():
    with pytest.raises(AttributeError):
        Settings(environ={}).colour


def test_reads_environment_at_call_time(monkeypatch):
    monkeypatch.setenv("PPINV_SAMPLES", "12")
    assert settings.samples == 12
    monkeypatch.delenv("PPINV_SAMPLES")
    assert settings.samples == 1000
