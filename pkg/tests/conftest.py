import numpy as np
import pytest

from curvephase import Circle, ConvexLimacon, InteractionGraph, PolarRose
from curvephase.acceptance import run_scenario


@pytest.fixture(scope="session")
def rose():
    return PolarRose(10.0, 6, 5.0)


@pytest.fixture(scope="session")
def circle():
    return Circle(10.0)


@pytest.fixture(scope="session")
def limacon():
    return ConvexLimacon(2.0, 4.5)


@pytest.fixture(scope="session")
def seven_graph():
    return InteractionGraph.circulant(7, (1, 2))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1729)


# Full-horizon scenario runs are expensive (~40 s each); share them.

@pytest.fixture(scope="session")
def sync_pack():
    # the shadow phase integration rides along for the consistency check
    return run_scenario("sync", track_psi_ode=True)


@pytest.fixture(scope="session")
def balance_pack():
    return run_scenario("balance")


@pytest.fixture(scope="session")
def sync_half_pack():
    return run_scenario("sync", dt=0.005)


@pytest.fixture(scope="session")
def balance_half_pack():
    return run_scenario("balance", dt=0.005)
