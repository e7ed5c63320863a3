import pytest

from spherical_landau import PhysicalParams, Truncation


@pytest.fixture(scope="session")
def natural():
    return PhysicalParams.natural()


@pytest.fixture(scope="session")
def scenario_truncation():
    """m in -5..5 with the harmonic cut-off appropriate for b = 100, beta = 50."""
    return Truncation(m_max=5, l_max=3, n_max=5773)
