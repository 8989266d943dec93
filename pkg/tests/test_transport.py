import warnings

import numpy as np
import pytest

from conftest import make_scenario
from qubitheat import (
    InvariantViolationError,
    RateTable,
    Regime,
    RegimeMismatchError,
    SweepAxis,
    Topology,
    channel_currents_closed_degenerate,
    channel_currents_closed_detuned,
    channel_decomposition,
    cross_current_equal_rate,
    delta_current,
    heat_current,
    heat_current_closed,
    heat_current_report,
    max_heat_current_degenerate,
    max_heat_current_degenerate_uncoupled,
    rate_matrix,
    steady_populations,
    steady_state_family,
    sweep,
)
from qubitheat.validation import random_scenario


def test_equilibrium_currents_vanish():
    scenario = make_scenario(t_left=50.0, t_right=50.0)
    report = heat_current_report(scenario)
    assert abs(report.q_left) <= 1e-12
    assert abs(report.q_right) <= 1e-12


def test_reference_scenario_current_sign_and_closed_form(detuned_scenario):
    report = heat_current_report(detuned_scenario)
    assert report.q_left > 0  # hot reservoir feeds the system
    assert abs(report.conservation_defect) <= 1e-12
    closed = heat_current_closed(detuned_scenario)
    assert abs(closed.q_left - report.q_left) <= 1e-12
    assert abs(closed.q_right - report.q_right) <= 1e-12


@pytest.mark.parametrize(
    "regime",
    [
        Regime.DETUNED_COUPLED,
        Regime.RESONANT_COUPLED,
        Regime.UNCOUPLED_DETUNED,
        Regime.UNCOUPLED_RESONANT,
        Regime.UNCOUPLED_INDEPENDENT,
    ],
)
def test_closed_form_currents_match_generic_route(regime, rng):
    for _ in range(1000):
        scenario = random_scenario(regime, rng)
        report = heat_current_report(scenario)
        closed = heat_current_closed(scenario)
        assert abs(closed.q_left - report.q_left) <= 1e-12
        assert abs(closed.q_right - report.q_right) <= 1e-12


def test_degenerate_closed_max_current_matches_generic(rng):
    for _ in range(1000):
        scenario = random_scenario(Regime.RESONANT_DEGENERATE, rng)
        rates = rate_matrix(scenario)
        family = steady_state_family(rates, 0.0)
        q_max = max_heat_current_degenerate(scenario)
        generic = heat_current(rates, family.residual, "L")
        assert abs(q_max - generic) <= 1e-12


def test_degenerate_current_linearity(degenerate_scenario):
    rates = rate_matrix(degenerate_scenario)
    family = steady_state_family(rates, 0.0)
    q_max = max_heat_current_degenerate(degenerate_scenario)
    for rho22 in np.linspace(0.0, 1.0, 11):
        q = heat_current(rates, family.at(rho22), "L")
        assert abs(q - (1.0 - rho22) * q_max) <= 1e-12
    q_third = heat_current(rates, family.at(0.3), "L")
    assert q_third == pytest.approx(0.7 * q_max, rel=1e-12)


def test_degenerate_uncoupled_closed_form_matches_general():
    scenario = make_scenario(omega1=3.0, omega2=3.0, g=0.0)
    a = max_heat_current_degenerate(scenario)
    b = max_heat_current_degenerate_uncoupled(scenario)
    assert abs(a - b) <= 1e-12
    coupled = make_scenario(omega1=3.0, omega2=3.0, g=0.3)
    with pytest.raises(RegimeMismatchError):
        max_heat_current_degenerate_uncoupled(coupled)


def test_heat_current_warns_off_steady_state(detuned_scenario):
    rates = rate_matrix(detuned_scenario)
    with pytest.warns(UserWarning):
        heat_current(rates, np.array([1.0, 0.0, 0.0, 0.0]), "L")


def test_channel_additivity_and_zero_cross(detuned_scenario):
    state = steady_populations(detuned_scenario)
    report = heat_current_report(detuned_scenario, state)
    assert abs(report.q_left_direct + report.q_left_cross - report.q_left) <= 1e-12
    with pytest.warns(UserWarning):
        no_cross = RateTable(gamma11=(0.002, 0.002), gamma22=(0.002, 0.002), gamma12=(0.0, 0.0))
    scenario = make_scenario(rates=no_cross)
    channels = channel_decomposition(scenario)
    assert channels["L"][1] == 0.0
    assert channels["R"][1] == 0.0


def test_channel_decomposition_requires_common(detuned_scenario):
    with pytest.raises(RegimeMismatchError):
        channel_decomposition(detuned_scenario.twin(Topology.INDEPENDENT))


def test_direct_channel_equals_independent_current_for_uniform_rates(detuned_scenario):
    # Uniform rates: both topologies share the steady state, so the direct
    # channel reproduces the independent-reservoir current exactly.
    state = steady_populations(detuned_scenario)
    channels = channel_decomposition(detuned_scenario, state)
    independent = detuned_scenario.twin(Topology.INDEPENDENT)
    q_independent = heat_current_report(independent).q_left
    assert abs(channels["L"][0] - q_independent) <= 1e-12


def test_channel_closed_forms_match_matrix_split(rng):
    for _ in range(50):
        scenario = random_scenario(Regime.DETUNED_COUPLED, rng)
        state = steady_populations(scenario)
        channels = channel_decomposition(scenario, state)
        for label in ("L", "R"):
            direct, cross = channel_currents_closed_detuned(scenario, state, label)
            assert abs(direct - channels[label][0]) <= 1e-11 * max(1.0, abs(direct))
            assert abs(cross - channels[label][1]) <= 1e-11 * max(1.0, abs(direct))


def test_cross_current_coth_form(detuned_scenario):
    state = steady_populations(detuned_scenario)
    channels = channel_decomposition(detuned_scenario, state)
    for label in ("L", "R"):
        closed = cross_current_equal_rate(detuned_scenario, label)
        assert closed == pytest.approx(channels[label][1], rel=1e-10)
    assert cross_current_equal_rate(detuned_scenario, "L") < 0  # hotter side loses to the cross channel


def test_degenerate_channel_closed_forms(degenerate_scenario, rng):
    rates = rate_matrix(degenerate_scenario)
    family = steady_state_family(rates, 0.0)
    for rho22 in rng.uniform(0.0, 1.0, size=5):
        state = family.at(rho22)
        channels = channel_decomposition(degenerate_scenario, state)
        for label in ("L", "R"):
            direct, cross = channel_currents_closed_degenerate(degenerate_scenario, rho22, label)
            assert direct == pytest.approx(channels[label][0], abs=1e-12)
            assert cross == pytest.approx(channels[label][1], abs=1e-12)
    # pure dark state: the two channels cancel exactly
    direct, cross = channel_currents_closed_degenerate(degenerate_scenario, 1.0, "L")
    assert abs(direct + cross) <= 1e-12
    channels = channel_decomposition(degenerate_scenario, family.at(1.0))
    assert abs(channels["L"][0] + channels["L"][1]) <= 1e-12


def test_delta_current_vanishes_without_coupling_or_gradient():
    uncoupled = make_scenario(g=0.0)
    assert abs(delta_current(uncoupled, uncoupled.twin(Topology.INDEPENDENT))) <= 1e-12
    balanced = make_scenario(t_left=21.0, t_right=21.0)
    assert abs(delta_current(balanced, balanced.twin(Topology.INDEPENDENT))) <= 1e-12


def test_delta_current_rejects_mismatched_scenarios(detuned_scenario):
    other = make_scenario(t_left=90.0).twin(Topology.INDEPENDENT)
    with pytest.raises(ValueError):
        delta_current(detuned_scenario, other)
    with pytest.raises(ValueError):
        delta_current(detuned_scenario, detuned_scenario)


def test_uncoupled_limit_continuity():
    nearly = make_scenario(g=1e-6)
    exact = make_scenario(g=0.0)
    q_nearly = heat_current_report(nearly).q_left
    q_exact = heat_current_closed(exact).q_left
    assert abs(q_nearly - q_exact) <= 1e-4 * abs(q_exact)
    # at exactly g = 0 the common and independent routes coincide
    q_common = heat_current_report(exact).q_left
    q_independent = heat_current_report(exact.twin(Topology.INDEPENDENT)).q_left
    assert abs(q_common - q_independent) <= 1e-12


def test_entropy_rate_nonnegative_random(rng):
    for regime in (Regime.DETUNED_COUPLED, Regime.UNCOUPLED_INDEPENDENT):
        for _ in range(50):
            report = heat_current_report(random_scenario(regime, rng))
            assert report.entropy_rate >= -1e-12


def test_report_validation_catches_broken_invariants():
    from qubitheat.transport import HeatCurrentReport, _validate_report

    with pytest.raises(InvariantViolationError):
        _validate_report(HeatCurrentReport(q_left=1.0, q_right=-0.5))


def test_sweep_temperature_axis_crosses_zero(detuned_scenario):
    axis = SweepAxis("T_L", tuple(np.linspace(1.0, 199.0, 100)))
    result = sweep(detuned_scenario, [axis])
    t_idx = result.columns.index("T_L")
    q_idx = result.columns.index("q_left")
    ts = np.array([row[t_idx] for row in result.rows])
    qs = np.array([row[q_idx] for row in result.rows])
    assert qs[ts < 21.0].max() < 0
    assert qs[ts > 21.0].min() > 0
    at_equilibrium = qs[np.isclose(ts, 21.0)]
    assert np.abs(at_equilibrium).max() <= 1e-12


def test_sweep_coupling_axis_monotone(detuned_scenario):
    axis = SweepAxis("g", tuple(np.linspace(0.0, 3.0, 61)))
    result = sweep(detuned_scenario, [axis], include_delta=True)
    q_idx = result.columns.index("q_left")
    d_idx = result.columns.index("delta_q_left")
    qs = np.array([row[q_idx] for row in result.rows])
    deltas = np.array([row[d_idx] for row in result.rows])
    assert np.all(np.diff(qs) < 0)  # common-reservoir current falls with coupling
    q_independent = qs + deltas
    assert np.all(np.diff(q_independent) < 0)


def test_sweep_rate_plane_zero_contour(detuned_scenario):
    gammas = tuple(np.linspace(0.0005, 0.006, 12))
    result = sweep(
        detuned_scenario,
        [SweepAxis("gamma_minus", gammas), SweepAxis("gamma_plus", gammas)],
        include_delta=True,
    )
    d_idx = result.columns.index("delta_q_left")
    grid = np.array([row[d_idx] for row in result.rows]).reshape(len(gammas), len(gammas))
    signs = np.sign(grid)
    assert (signs > 0).any() and (signs < 0).any()  # the plane is split by a zero contour


def test_sweep_is_thread_invariant(detuned_scenario):
    axes = [SweepAxis("T_L", tuple(np.linspace(30.0, 150.0, 13)))]
    serial = sweep(detuned_scenario, axes, include_delta=True, threads=1)
    parallel = sweep(detuned_scenario, axes, include_delta=True, threads=4)
    assert serial == parallel


def test_sweep_rejects_bad_axes(detuned_scenario):
    with pytest.raises(ValueError):
        SweepAxis("T_L", (-5.0, 10.0))
    with pytest.raises(ValueError):
        SweepAxis("unknown", (1.0,))
    with pytest.raises(ValueError):
        sweep(detuned_scenario, [])
    with pytest.raises(ValueError):
        sweep(
            detuned_scenario,
            [SweepAxis("T_L", (30.0,)), SweepAxis("T_L", (40.0,))],
        )
