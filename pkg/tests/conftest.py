import numpy as np
import pytest

from spinboson import BathSpec, FrequencyGrid


@pytest.fixture(scope="session")
def grid_default():
    """General-purpose grid: x_max 60, moderate oscillation support."""
    return FrequencyGrid.build(n_nodes=4000, x_max=60.0, tau_max=20.0)


@pytest.fixture(scope="session")
def grid_thermal():
    """Long thermal tail for theta up to ~10."""
    return FrequencyGrid.build(n_nodes=6000, x_max=260.0, tau_max=10.0)


@pytest.fixture(scope="session")
def grid_fast():
    """Oscillation-resolved grid for long pulse trains (tau up to 300)."""
    return FrequencyGrid.build(n_nodes=4000, x_max=60.0, tau_max=300.0)


@pytest.fixture(scope="session")
def bath_ohmic_cold():
    return BathSpec(d=1, lam=0.25, theta=0.0)


@pytest.fixture(scope="session")
def bath_super_cold():
    return BathSpec(d=3, lam=1.0, theta=0.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
