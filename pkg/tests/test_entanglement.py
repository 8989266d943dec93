import math

import numpy as np
import pytest

from conftest import make_scenario
from qubitheat import (
    Regime,
    RegimeMismatchError,
    XStateElements,
    coa_detuned_closed,
    coa_general,
    coa_general_product,
    coa_resonant_closed,
    rate_matrix,
    resonant_intercept,
    steady_populations,
    steady_state_family,
    to_bare_basis,
    x_elements_detuned,
    x_elements_resonant,
)
from qubitheat.validation import random_scenario

SINGLET = np.zeros((4, 4))
_v = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
SINGLET += np.outer(_v, _v)


def test_reference_states():
    assert coa_general(SINGLET) == pytest.approx(1.0, abs=1e-7)
    ground = np.diag([0.0, 0.0, 0.0, 1.0])
    assert coa_general(ground) == pytest.approx(0.0, abs=1e-7)
    assert coa_general(np.eye(4) / 4.0) == pytest.approx(1.0, abs=1e-12)


def test_rejects_invalid_density_matrices():
    with pytest.raises(ValueError):
        coa_general(np.diag([0.5, 0.5, 0.5, -0.5]))
    with pytest.raises(ValueError):
        coa_general(np.diag([0.7, 0.3, 0.2, 0.2]))


def test_x_state_validation():
    with pytest.raises(ValueError):
        XStateElements(d=0.4, e=0.3, f=0.2, j=0.1, k=0.3, l=0.0)  # |k| > sqrt(d j)
    x = XStateElements(d=0.4, e=0.3, f=0.2, j=0.1, k=0.1, l=0.05)
    assert np.trace(x.matrix()) == pytest.approx(1.0)


def test_detuned_elements_match_basis_transform(detuned_scenario):
    state = steady_populations(detuned_scenario)
    x = x_elements_detuned(state, detuned_scenario.eig)
    bare = to_bare_basis(state, detuned_scenario.eig)
    assert np.abs(x.matrix() - bare).max() <= 1e-14


def test_detuned_closed_form_matches_oracle(detuned_scenario, rng):
    state = steady_populations(detuned_scenario)
    closed = coa_detuned_closed(state, detuned_scenario.eig)
    oracle = coa_general(to_bare_basis(state, detuned_scenario.eig))
    assert 0.0 < closed < 1.0
    assert abs(closed - oracle) <= 1e-9
    for _ in range(200):
        scenario = random_scenario(Regime.DETUNED_COUPLED, rng)
        state = steady_populations(scenario)
        closed = coa_detuned_closed(state, scenario.eig)
        oracle = coa_general(to_bare_basis(state, scenario.eig))
        assert abs(closed - oracle) <= 1e-9
        assert -1e-12 <= closed <= 1.0 + 1e-12


def test_detuned_closed_form_uncoupled_reduction(rng):
    scenario = make_scenario(g=0.0)
    state = steady_populations(scenario)
    closed = coa_detuned_closed(state, scenario.eig)
    expected = 2.0 * math.sqrt(state[0] * state[3]) + 2.0 * math.sqrt(state[1] * state[2])
    assert closed == pytest.approx(expected, abs=1e-15)


def test_infinite_temperature_limit_value():
    eig = make_scenario().eig
    assert coa_detuned_closed(np.full(4, 0.25), eig) == pytest.approx(1.0, abs=1e-12)
    assert coa_general(np.eye(4) / 4.0) == pytest.approx(1.0, abs=1e-12)


def test_resonant_closed_form(degenerate_scenario):
    h = resonant_intercept(degenerate_scenario)
    assert 0.0 < h < 1.0
    assert coa_resonant_closed(1.0, degenerate_scenario) == pytest.approx(1.0, abs=1e-15)
    assert coa_resonant_closed(0.0, degenerate_scenario) == pytest.approx(h, abs=1e-15)
    assert coa_resonant_closed(0.5, degenerate_scenario) == pytest.approx((1.0 + h) / 2.0, abs=1e-15)


def test_resonant_closed_matches_oracle(degenerate_scenario, rng):
    family = steady_state_family(rate_matrix(degenerate_scenario), 0.0)
    for rho22 in rng.uniform(0.0, 1.0, size=100):
        state = family.at(rho22)
        bare = to_bare_basis(state, degenerate_scenario.eig)
        closed = coa_resonant_closed(float(rho22), degenerate_scenario)
        assert abs(closed - coa_general(bare)) <= 1e-9


def test_resonant_elements_match_family_transform(degenerate_scenario, rng):
    family = steady_state_family(rate_matrix(degenerate_scenario), 0.0)
    for rho22 in (0.0, 0.37, 1.0):
        x = x_elements_resonant(degenerate_scenario, rho22)
        bare = to_bare_basis(family.at(rho22), degenerate_scenario.eig)
        assert np.abs(x.matrix() - bare).max() <= 1e-12


def test_resonant_linearity(degenerate_scenario):
    samples = np.linspace(0.0, 1.0, 11)
    values = np.array([coa_resonant_closed(r, degenerate_scenario) for r in samples])
    coeffs = np.polyfit(samples, values, 1)
    residual = np.abs(values - np.polyval(coeffs, samples)).max()
    assert residual <= 1e-12


def test_product_spectrum_route_agrees(rng):
    for _ in range(50):
        scenario = random_scenario(Regime.DETUNED_COUPLED, rng)
        bare = to_bare_basis(steady_populations(scenario), scenario.eig)
        assert abs(coa_general(bare) - coa_general_product(bare)) <= 5e-8


def test_regime_guard(detuned_scenario):
    with pytest.raises(RegimeMismatchError):
        coa_resonant_closed(0.5, detuned_scenario)
    with pytest.raises(RegimeMismatchError):
        x_elements_resonant(detuned_scenario, 0.5)
