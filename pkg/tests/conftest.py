import pytest

from bilax.toda_models import build_bcn, build_dn


@pytest.fixture(scope="session")
def bcn1():
    return build_bcn(1)


@pytest.fixture(scope="session")
def bcn2():
    return build_bcn(2)


@pytest.fixture(scope="session")
def bcn3():
    return build_bcn(3)


@pytest.fixture(scope="session")
def dn2():
    return build_dn(2)


@pytest.fixture(scope="session")
def dn3():
    return build_dn(3)
