import sys
import numpy as np
import pytest
from hypothesis import settings

from ahlfors import Conformal, build_grid

settings.register_profile("default", max_examples=15, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def flat2():
    return build_grid(2, (32, 32))


@pytest.fixture(scope="session")
def flat3():
    return build_grid(3, (16, 16, 16))


@pytest.fixture(scope="session")
def conf2():
    return build_grid(2, (32, 32), Conformal(lambda x, y: 0.1 * np.cos(x), amp=0.1))


@pytest.fixture(scope="session")
def conf3():
    return build_grid(3, (32, 32, 32), Conformal(lambda x, y, z: 0.1 * np.cos(x) + 0.05 * np.sin(y + z)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
