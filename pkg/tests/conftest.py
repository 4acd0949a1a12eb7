import pytest

from kellersat import encoder, symmetry
from kellersat.kellergraph import KellerInstance


@pytest.fixture(scope="session")
def inst73():
    return KellerInstance(7, 3)


@pytest.fixture(scope="session")
def vm73():
    return encoder.VarMap(7, 3)


@pytest.fixture(scope="session")
def phi73(inst73, vm73):
    return symmetry.build_phi(inst73, vm73)


@pytest.fixture(scope="session")
def cases73(inst73, vm73):
    return symmetry.enumerate_cases(inst73, vm73)
