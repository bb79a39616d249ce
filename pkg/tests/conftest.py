import os

import pytest
from hypothesis import HealthCheck, settings

from quasigen.mollifier import build_mollifier
from quasigen.specgrid import Grid

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def moll(grid):
    """theta_n for n = 1..64 on the default grid."""
    return build_mollifier(range(1, 65), grid)
