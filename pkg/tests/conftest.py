import numpy as np
import pytest

from iretarget import build_human, build_humanoid


@pytest.fixture(scope="session")
def human():
    return build_human("human")


@pytest.fixture(scope="session")
def partner_skel():
    return build_human("partner")


@pytest.fixture(scope="session")
def humanoid():
    return build_humanoid("humanoid")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
