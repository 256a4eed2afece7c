import pytest

from spectral_ifs.example_p import example_triple, quarter_triple
from spectral_ifs.triple import make_triple


@pytest.fixture(scope="session")
def ex3():
    return example_triple(3)


@pytest.fixture(scope="session")
def quarter():
    return quarter_triple()


@pytest.fixture(scope="session")
def non_hadamard():
    return make_triple([[2]], [(0,), (1,)], [(0,), (2,)])
