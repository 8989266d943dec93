import numpy as np
import pytest

from conftest import make_scenario
from qubitheat import (
    DARK_STATE,
    DegenerateSteadyStateError,
    NotDegenerateError,
    NullspaceDimensionError,
    RateTable,
    Regime,
    SteadyStateFamily,
    Topology,
    bose_occupation,
    build_liouvillian,
    equal_rate_steady_state,
    rate_matrix,
    steady_state_closed_form,
    steady_state_family,
    steady_state_nullspace,
)
from qubitheat.validation import random_scenario


def occupation_sums(scenario):
    eig = scenario.eig
    n_minus = sum(bose_occupation(eig.omega_minus, r.temperature) for r in scenario.reservoirs)
    n_plus = sum(bose_occupation(eig.omega_plus, r.temperature) for r in scenario.reservoirs)
    return n_minus, n_plus


def test_closed_form_matches_nullspace(detuned_scenario):
    closed = steady_state_closed_form(rate_matrix(detuned_scenario))
    rho = steady_state_nullspace(build_liouvillian(detuned_scenario))
    assert np.abs(closed - np.real(np.diag(rho))).max() <= 1e-10


def test_levi_civita_and_elimination_agree(rng):
    for regime in (Regime.DETUNED_COUPLED, Regime.RESONANT_COUPLED,
                   Regime.UNCOUPLED_DETUNED, Regime.UNCOUPLED_RESONANT,
                   Regime.UNCOUPLED_INDEPENDENT):
        for _ in range(40):
            rates = rate_matrix(random_scenario(regime, rng))
            a = steady_state_closed_form(rates, method="levi_civita")
            b = steady_state_closed_form(rates, method="solve")
            assert np.abs(a - b).max() <= 1e-12


def test_gibbs_fixed_point_at_equal_temperatures(rng):
    for regime in (Regime.DETUNED_COUPLED, Regime.RESONANT_COUPLED,
                   Regime.UNCOUPLED_DETUNED, Regime.UNCOUPLED_RESONANT,
                   Regime.UNCOUPLED_INDEPENDENT):
        scenario = random_scenario(regime, rng)
        temp = 40.0
        scenario = make_scenario(
            omega1=scenario.params.omega1, omega2=scenario.params.omega2,
            g=scenario.params.g, t_left=temp, t_right=temp,
            topology=scenario.topology,
            rates_left=scenario.left.rates, rates_right=scenario.right.rates,
        )
        gibbs = np.exp(-scenario.eig.lambdas / temp)
        gibbs /= gibbs.sum()
        closed = steady_state_closed_form(rate_matrix(scenario))
        assert np.abs(closed - gibbs).max() <= 1e-10


def test_equal_rate_reference_values():
    pops = equal_rate_steady_state(1.0, 0.5)
    assert np.allclose(pops * 12.0, [7.5, 2.5, 1.5, 0.5], atol=1e-12)
    assert np.array_equal(equal_rate_steady_state(0.0, 0.0), [1.0, 0.0, 0.0, 0.0])


def test_equal_rate_matches_closed_form(rng):
    for _ in range(60):
        scenario = random_scenario(Regime.DETUNED_COUPLED, rng)
        gamma_minus, gamma_plus = rng.uniform(2e-4, 8e-3, size=2)
        table = RateTable.per_frequency(gamma_minus, gamma_plus)
        scenario = make_scenario(
            omega1=scenario.params.omega1, omega2=scenario.params.omega2,
            g=scenario.params.g, t_left=scenario.left.temperature,
            t_right=scenario.right.temperature, rates=table,
        )
        expected = equal_rate_steady_state(*occupation_sums(scenario))
        assert expected[0] > expected[1] > expected[2] > expected[3]
        for topology in (Topology.COMMON, Topology.INDEPENDENT):
            closed = steady_state_closed_form(rate_matrix(scenario.twin(topology)))
            assert np.abs(closed - expected).max() <= 1e-12


def test_equal_rate_state_is_rate_independent():
    base = make_scenario(rates=RateTable.per_frequency(0.001, 0.004))
    scaled = make_scenario(rates=RateTable.per_frequency(0.005, 0.02))
    a = steady_state_closed_form(rate_matrix(base))
    b = steady_state_closed_form(rate_matrix(scaled))
    assert np.abs(a - b).max() <= 1e-12


def test_closed_form_rejects_degenerate(degenerate_scenario):
    with pytest.raises(DegenerateSteadyStateError):
        steady_state_closed_form(rate_matrix(degenerate_scenario))


def test_family_rejects_unique(detuned_scenario):
    with pytest.raises(NotDegenerateError):
        steady_state_family(rate_matrix(detuned_scenario), 0.5)


def test_family_closure(degenerate_scenario):
    rates = rate_matrix(degenerate_scenario)
    family = steady_state_family(rates, 0.0)
    assert np.array_equal(family.dark, DARK_STATE)
    assert family.residual[1] == 0.0
    for rho22 in (0.0, 0.25, 0.5, 0.75, 1.0):
        state = family.at(rho22)
        assert np.abs(rates.total @ state).max() <= 1e-12
        assert state.sum() == pytest.approx(1.0, abs=1e-12)


def test_family_residual_uncoupled_pattern():
    # g = 0, equal rates, equal temperatures: residual follows the
    # (emission^2, 0, emission*absorption, absorption^2) pattern.
    temp = 30.0
    scenario = make_scenario(omega1=3.0, omega2=3.0, g=0.0, t_left=temp, t_right=temp)
    family = steady_state_family(rate_matrix(scenario), 0.0)
    omega = 3.0
    n = bose_occupation(omega, temp)
    j_minus = 2 * (n + 1.0)  # summed over the two identical reservoirs, common rate drops out
    j_plus = 2 * n
    raw = np.array([j_minus**2, 0.0, j_minus * j_plus, j_plus**2])
    assert np.abs(family.residual - raw / raw.sum()).max() <= 1e-12


def test_nullspace_unique_and_family(detuned_scenario, degenerate_scenario):
    rho = steady_state_nullspace(build_liouvillian(detuned_scenario))
    assert rho.shape == (4, 4)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)

    family = steady_state_nullspace(build_liouvillian(degenerate_scenario))
    assert isinstance(family, SteadyStateFamily)
    assert np.array_equal(family.dark, DARK_STATE)
    closed = steady_state_family(rate_matrix(degenerate_scenario), 0.0)
    assert np.abs(family.residual - closed.residual).max() <= 1e-9
    with pytest.raises(ValueError):
        _ = family.populations  # no rho22 selected


def test_nullspace_rejects_undissipated_system():
    scenario = make_scenario(rates=RateTable.flat(0.0))
    with pytest.raises(NullspaceDimensionError):
        steady_state_nullspace(build_liouvillian(scenario))


def test_population_clamp_behavior():
    gen = rate_matrix(make_scenario()).total
    pops = steady_state_closed_form(gen)
    assert pops.min() >= 0.0
    assert pops.sum() == pytest.approx(1.0, abs=1e-12)
