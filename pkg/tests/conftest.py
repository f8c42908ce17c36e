import numpy as np
import pytest

from helixwave import DomainParams, choose_parameters, sommerfeld_spec


@pytest.fixture(scope="session")
def params():
    """Canonical annulus: light circle at r = 1 sits strictly inside (0.2, 2)."""
    return DomainParams(omega=1.0, epsilon=0.2, big_r=2.0)


@pytest.fixture(scope="session")
def bspec(params):
    return sommerfeld_spec(params, "+")


@pytest.fixture(scope="session")
def mult(params, bspec):
    return choose_parameters(params, bspec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
