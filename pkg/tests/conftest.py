import pytest

from ppinv.gf_core import make_field


@pytest.fixture(scope="session")
def f4():
    return make_field(2, 1, 2)


@pytest.fixture(scope="session")
def f9():
    return make_field(3, 1, 2)


@pytest.fixture(scope="session")
def f16():
    """F_{4^2}, the quadratic family's field for q = 4."""
    return make_field(2, 2, 2)


@pytest.fixture(scope="session")
def f25():
    return make_field(5, 1, 2)


@pytest.fixture(scope="session")
def f27():
    return make_field(3, 1, 3)


@pytest.fixture(scope="session")
def f125():
    return make_field(5, 1, 3)


@pytest.fixture(scope="session")
def f343():
    return make_field(7, 1, 3)
