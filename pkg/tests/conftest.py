import time

import pytest

from zetagram.moments import GramSweep


class TimedSweep:
    """GramSweep plus the wall-clock seconds it took to build."""

    def __init__(self, phi, t_max):
        start = time.perf_counter()
        self.sweep = GramSweep(phi, t_max)
        self.build_seconds = time.perf_counter() - start


@pytest.fixture(scope="session")
def sweep_1e5_phi0():
    return TimedSweep(0.0, 1e5)


@pytest.fixture(scope="session")
def sweep_1e5_pi2():
    import math
    return TimedSweep(math.pi / 2, 1e5)


@pytest.fixture(scope="session")
def sweep_1e5_pi3():
    import math
    return TimedSweep(math.pi / 3, 1e5)


@pytest.fixture(scope="session")
def sweep_1e4_phi0():
    return TimedSweep(0.0, 1e4)


@pytest.fixture(scope="session")
def sweep_1e3_phi0():
    return TimedSweep(0.0, 1e3)
