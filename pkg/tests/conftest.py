import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from treegroups.catalogs import GroupCase, standard_odometer


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def odometer():
    return standard_odometer()


@pytest.fixture(params=[GroupCase.periodic(2), GroupCase.prep(1, 3)], ids=str)
def finite_case(request):
    return request.param
