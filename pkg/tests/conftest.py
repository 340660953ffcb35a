import numpy as np
import pytest

from mmimmo.geometry import CarrierConfig


@pytest.fixture
def carrier():
    return CarrierConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(20170521)
