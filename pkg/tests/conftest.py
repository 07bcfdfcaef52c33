import numpy as np
import pytest

from isac_rates.sweep import table1_channel_params


@pytest.fixture(scope="session")
def table1_p1():
    """The 36 study-grid configurations at P = 1."""
    return table1_channel_params(1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240813)
