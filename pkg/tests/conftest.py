import pytest

from blockshrink import make_basis


@pytest.fixture(scope="session")
def haar():
    return make_basis("haar", 12)


@pytest.fixture(scope="session")
def db4():
    return make_basis("db4", 12)


@pytest.fixture(scope="session")
def db6():
    return make_basis("db6", 12)
