import numpy as np
import pytest

from sphcoint import MultipoleSpec, build_grid


@pytest.fixture(scope="session")
def paper_spec():
    """L = 10, d = 0.3 everywhere, flat variances (the table configuration)."""
    return MultipoleSpec.unit_variance(10, 0.3)


@pytest.fixture(scope="session")
def small_spec():
    return MultipoleSpec.unit_variance(3, 0.3)


@pytest.fixture(scope="session")
def grid16():
    return build_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return build_grid(32)


@pytest.fixture(scope="session")
def grid64():
    return build_grid(64)


def mc_sem(samples):
    """Standard error of the mean, estimated from the sample."""
    samples = np.asarray(samples, dtype=float)
    return samples.std(ddof=1) / np.sqrt(samples.size)
