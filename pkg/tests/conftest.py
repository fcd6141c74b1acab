import pytest

from plsec.model import reference_defaults


@pytest.fixture
def ref():
    """Reference deployment: R = 100 m, r = 50 m, kappa = 1e6, theta = 3."""
    return reference_defaults()


@pytest.fixture
def ref_d50():
    return reference_defaults(D=50.0)
