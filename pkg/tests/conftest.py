import numpy as np
import pytest

from qubitheat import RateTable, ReservoirSpec, Scenario, SystemParams, Topology


def make_scenario(
    omega1=3.0,
    omega2=4.0,
    g=0.3,
    t_left=100.0,
    t_right=21.0,
    topology=Topology.COMMON,
    rates=None,
    rates_left=None,
    rates_right=None,
):
    table_l = rates_left or rates or RateTable.flat(0.003)
    table_r = rates_right or rates or RateTable.flat(0.003)
    return Scenario(
        params=SystemParams(omega1=omega1, omega2=omega2, g=g),
        topology=topology,
        left=ReservoirSpec("L", t_left, table_l),
        right=ReservoirSpec("R", t_right, table_r),
    )


@pytest.fixture
def detuned_scenario():
    """Reference detuned common-reservoir scenario (omega 3 and 4, g = 0.3)."""
    return make_scenario()


@pytest.fixture
def degenerate_scenario():
    """Reference resonant equal-rate scenario carrying the dark-state family."""
    return make_scenario(omega1=3.0, omega2=3.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
