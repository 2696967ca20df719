import numpy as np
import pytest
from hypothesis import settings

from smc_arm_lab import arm
from smc_arm_lab.sim import SimConfig, run
from smc_arm_lab.controllers import make_laws

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def default_arm():
    return arm.ArmParams()


@pytest.fixture(scope="session")
def ftsmc_sign_run():
    return run(SimConfig(controllers=make_laws("ftsmc", "sign")))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULT_LINES
    except ImportError:
        return
    if RESULT_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULT_LINES):
            terminalreporter.write_line(RESULT_LINES[number])
