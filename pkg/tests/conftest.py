import numpy as np
import pytest

from cyclostab import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the jitted kernels once so timed sections measure the math
    _kernels.warmup()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
