"""Shared, session-cached solver runs so expensive solves happen once per test session."""

import pytest

from djlong.autonomous import solve_autonomous
from djlong.params import ProfileParams
from djlong.singular_bvp import solve_singular
from djlong.variational import solve_regular


@pytest.fixture(scope="session")
def singular_both():
    """Nonautonomous singular profile at beta = -1/2, c1 = c2 = 1 on the default grid."""
    return solve_singular(ProfileParams.from_c(-0.5, 1.0, 1.0))


@pytest.fixture(scope="session")
def autonomous_half():
    """Autonomous profile at beta = -1/2, c1 = 1, c2 = 0 on the default grid."""
    return solve_autonomous(ProfileParams.from_c(-0.5, 1.0, 0.0))


@pytest.fixture(scope="session")
def regular_half():
    """Positive regular profile at beta = 1/2, c1 = c2 = 1."""
    return solve_regular(ProfileParams.from_c(0.5, 1.0, 1.0))


@pytest.fixture(scope="session")
def regular_linking():
    """Sign-changing regular profile at beta = 3/2, c1 = c2 = 1."""
    return solve_regular(ProfileParams.from_c(1.5, 1.0, 1.0))
