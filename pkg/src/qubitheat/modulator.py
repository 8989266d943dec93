"""Optically controlled heat-current staircase in the degenerate resonant regime.

A resonant drive on the 2-3 transition redistributes population between the
dark level and the triplet; free dissipative evolution then relaxes the
remaining population onto the residual steady state, leaving the dark weight
rho22 untouched.  The steady current after each relaxation window is
(1 - rho22) times the maximal current.

Drive phases are treated as instantaneous relative to dissipation (pulse
durations are a few drive periods, orders of magnitude shorter than 1/rates
at the intended parameters), so dissipation is frozen while the drive is on.
Pulse-generated 2-3 coherences are dropped at pulse end; under the secular
generator they influence neither populations nor currents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .dissipators import RateMatrix, Regime, RegimeMismatchError, Scenario, rate_matrix
from .steadystate import SteadyStateFamily, steady_state_family

INTEGRATOR_RTOL = 1e-12
INTEGRATOR_ATOL = 1e-14
# Target targets this far outside the drive orbit are still accepted as
# endpoint hits; beyond that the pulse cannot reach them.
ORBIT_TOL = 1e-12

APPROXIMATION_FLAGS = (
    "dissipation frozen during drive phases",
    "drive coherences discarded at pulse end",
)


class UnreachableTargetError(ValueError):
    """Requested dark-level population lies outside the drive orbit."""


@dataclass(frozen=True)
class PulseEvent:
    """Resonant drive of one transition pair for a fixed duration."""

    start_time: float
    duration: float
    rabi_frequency: float
    transition: tuple[int, int] = (2, 3)

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError(f"duration must be nonnegative, got {self.duration}")
        if self.rabi_frequency < 0:
            raise ValueError(f"rabi_frequency must be nonnegative, got {self.rabi_frequency}")
        a, b = self.transition
        if a == b or not (1 <= a <= 4 and 1 <= b <= 4):
            raise ValueError(f"transition levels must be distinct and in 1..4, got {self.transition}")

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration


@dataclass(frozen=True)
class PopulationTransfer:
    """Instantaneous reassignment within the (2, 3) pair to a target rho22.

    Idealizes the multi-level transfer sequences needed when a single
    resonant pulse cannot reach the target; conserves the pair sum and the
    trace.
    """

    start_time: float
    target_rho22: float

    def __post_init__(self):
        if not 0.0 <= self.target_rho22 <= 1.0:
            raise ValueError(f"target_rho22 must lie in [0, 1], got {self.target_rho22}")

    @property
    def duration(self) -> float:
        return 0.0

    @property
    def end_time(self) -> float:
        return self.start_time


@dataclass(frozen=True)
class PulseSchedule:
    """Time-ordered, non-overlapping drive events plus the relaxation window."""

    events: tuple
    relaxation_window: float = 50.0

    def __post_init__(self):
        if self.relaxation_window < 0:
            raise ValueError("relaxation_window must be nonnegative")
        last_end = -math.inf
        last_start = -math.inf
        for ev in self.events:
            if ev.start_time <= last_start:
                raise ValueError("event start times must be strictly increasing")
            if ev.start_time < last_end:
                raise ValueError("events must not overlap")
            last_start, last_end = ev.start_time, ev.end_time


@dataclass(frozen=True)
class TimeSeries:
    """Sampled transient: populations, per-reservoir currents, and phase tags."""

    times: np.ndarray
    populations: np.ndarray
    q_left: np.ndarray
    q_right: np.ndarray
    phase: tuple[str, ...]
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        sums = self.populations.sum(axis=1)
        if np.abs(sums - 1.0).max() > 1e-10:
            raise ValueError("populations must stay normalized along the trace")
        if self.populations.min() < -1e-10:
            raise ValueError("populations must stay nonnegative along the trace")


def rabi_populations(rho22_0: float, rho33_0: float, omega_r: float, t):
    """Closed-form populations under resonant driving of the 2-3 pair.

    rho22(t) = A+/2 - (A-/2) cos(omega_r t) with A+- = rho33(0) +- rho22(0);
    the pair sum is conserved exactly and other levels are untouched.
    """
    for name, val in (("rho22_0", rho22_0), ("rho33_0", rho33_0)):
        if not -1e-12 <= val <= 1.0 + 1e-12:
            raise ValueError(f"{name} must lie in [0, 1], got {val}")
    a_plus = rho33_0 + rho22_0
    a_minus = rho33_0 - rho22_0
    osc = 0.5 * a_minus * np.cos(np.multiply(omega_r, t))
    rho22 = 0.5 * a_plus - osc
    # exact complement keeps the pair sum conserved bit for bit
    rho33 = a_plus - rho22
    return rho22, rho33


def solve_pulse_duration(
    rho22_target: float, rho22_now: float, rho33_now: float, omega_r: float
) -> float:
    """Smallest nonnegative drive time reaching the target dark-level population.

    The drive orbit of rho22 is [min, max] of the current (rho22, rho33);
    targets outside it raise :class:`UnreachableTargetError`.
    """
    if omega_r <= 0:
        raise ValueError(f"rabi frequency must be positive, got {omega_r}")
    lo, hi = min(rho22_now, rho33_now), max(rho22_now, rho33_now)
    if not lo - ORBIT_TOL <= rho22_target <= hi + ORBIT_TOL:
        raise UnreachableTargetError(
            f"target rho22={rho22_target} outside the drive orbit [{lo}, {hi}]"
        )
    a_minus = rho33_now - rho22_now
    if a_minus == 0.0:
        return 0.0
    cos_val = (rho33_now + rho22_now - 2.0 * rho22_target) / a_minus
    cos_val = min(1.0, max(-1.0, cos_val))
    return math.acos(cos_val) / omega_r


def evolve_free(m, state0: np.ndarray, t: float) -> np.ndarray:
    """Free dissipative evolution of the population vector for time t.

    Long horizons are integrated in chunks of a few hundred relaxation
    times; once the residual |M rho| reaches the roundoff floor the state is
    parked (the generator is contractive, so it cannot leave again), which
    keeps arbitrarily long horizons cheap for the explicit stepper.
    """
    gen = m.total if isinstance(m, RateMatrix) else np.asarray(m, dtype=float)
    state = np.asarray(state0, dtype=float).copy()
    if t == 0:
        return state
    scale = np.abs(gen).max()
    diag = np.abs(np.diag(gen))
    active = diag[diag > 0]
    chunk = t if active.size == 0 else min(t, 200.0 / active.min())
    remaining = t
    while remaining > 0:
        # Below this residual the stepper only wanders inside its own
        # tolerance band around the stationary set; the true flow moves the
        # state by less than residual / slowest rate from here on.
        floor = 10.0 * INTEGRATOR_RTOL * scale * max(np.abs(state).max(), 1e-300)
        if np.abs(gen @ state).max() <= floor:
            break
        span = min(chunk, remaining)
        sol = solve_ivp(
            lambda _t, y: gen @ y,
            (0.0, span),
            state,
            method="RK45",
            rtol=INTEGRATOR_RTOL,
            atol=INTEGRATOR_ATOL,
        )
        if not sol.success:
            raise RuntimeError(f"free evolution failed: {sol.message}")
        state = sol.y[:, -1]
        remaining -= span
    return state


def _evolve_sampled(gen: np.ndarray, state0: np.ndarray, span: float, samples: int):
    t_eval = np.linspace(0.0, span, samples)
    sol = solve_ivp(
        lambda _t, y: gen @ y,
        (0.0, span),
        state0,
        method="RK45",
        rtol=INTEGRATOR_RTOL,
        atol=INTEGRATOR_ATOL,
        t_eval=t_eval,
    )
    if not sol.success:
        raise RuntimeError(f"free evolution failed: {sol.message}")
    return t_eval, sol.y.T


def steady_family(scenario: Scenario) -> SteadyStateFamily:
    """Dark/residual family of a degenerate resonant scenario."""
    if scenario.regime is not Regime.RESONANT_DEGENERATE:
        raise RegimeMismatchError(
            f"the modulator protocol requires the degenerate resonant regime, "
            f"got {scenario.regime.value}"
        )
    return steady_state_family(rate_matrix(scenario), rho22=1.0)


def build_staircase_schedule(
    scenario: Scenario,
    targets: list[float],
    omega_r: float = 0.5 * math.pi,
    window: float = 50.0,
    initial_rho22: float = 1.0,
) -> PulseSchedule:
    """Schedule driving rho22 through ``targets``, one event per relaxation window.

    Every step uses a physical resonant pulse when the target sits inside the
    drive orbit predicted for the relaxed plateau; otherwise it falls back to
    an idealized :class:`PopulationTransfer`.
    """
    family = steady_family(scenario)
    residual3 = family.residual[2]
    events = []
    t = window
    rho22 = initial_rho22
    for target in targets:
        if not 0.0 <= target <= 1.0:
            raise ValueError(f"targets must lie in [0, 1], got {target}")
        rho33 = (1.0 - rho22) * residual3
        try:
            duration = solve_pulse_duration(target, rho22, rho33, omega_r)
            events.append(PulseEvent(start_time=t, duration=duration, rabi_frequency=omega_r))
            t += duration + window
        except UnreachableTargetError:
            events.append(PopulationTransfer(start_time=t, target_rho22=target))
            t += window
        rho22 = target
    return PulseSchedule(events=tuple(events), relaxation_window=window)


def run_schedule(
    scenario: Scenario,
    schedule: PulseSchedule,
    initial: np.ndarray,
    *,
    sample_dt: float = 0.5,
    drive_samples: int = 41,
) -> TimeSeries:
    """Simulate the modulator protocol and sample the transient currents.

    Free phases integrate d|rho>/dt = M |rho| with the adaptive integrator;
    drive phases apply the closed-form resonant oscillation with dissipation
    frozen.  Currents are read as <lambda| M_alpha |rho(t)> throughout.
    """
    steady_family(scenario)  # gate on the degenerate resonant regime
    rates = rate_matrix(scenario)
    if sample_dt <= 0:
        raise ValueError("sample_dt must be positive")
    lam = scenario.eig.lambdas
    gen = rates.total

    times: list[float] = []
    pops: list[np.ndarray] = []
    phases: list[str] = []

    def record(t: float, state: np.ndarray, phase: str):
        times.append(float(t))
        pops.append(np.asarray(state, dtype=float).copy())
        phases.append(phase)

    state = np.asarray(initial, dtype=float).copy()
    if abs(state.sum() - 1.0) > 1e-10 or state.min() < -1e-12:
        raise ValueError("initial populations must be normalized and nonnegative")
    now = 0.0
    record(now, state, "free")

    def free_until(t_end: float):
        nonlocal now, state
        span = t_end - now
        if span <= 0:
            return
        samples = max(2, int(math.ceil(span / sample_dt)) + 1)
        rel_t, traj = _evolve_sampled(gen, state, span, samples)
        for dt_, st in zip(rel_t[1:], traj[1:]):
            record(now + dt_, st, "free")
        state = traj[-1]
        now = t_end

    for event in schedule.events:
        free_until(event.start_time)
        if isinstance(event, PopulationTransfer):
            pair_sum = state[1] + state[2]
            if event.target_rho22 > pair_sum + 1e-12:
                raise UnreachableTargetError(
                    f"transfer target {event.target_rho22} exceeds the pair budget {pair_sum}"
                )
            state = state.copy()
            state[2] = pair_sum - event.target_rho22
            state[1] = event.target_rho22
            record(now, state, "drive")
        else:
            if event.transition != (2, 3):
                raise ValueError("only the (2, 3) transition is driven in this regime")
            r22_0, r33_0 = state[1], state[2]
            local_t = np.linspace(0.0, event.duration, drive_samples)
            r22, r33 = rabi_populations(r22_0, r33_0, event.rabi_frequency, local_t)
            for dt_, a, b in zip(local_t[1:], r22[1:], r33[1:]):
                st = state.copy()
                st[1], st[2] = a, b
                record(now + dt_, st, "drive")
            state = state.copy()
            state[1], state[2] = r22[-1], r33[-1]
            now = event.end_time

    free_until(now + schedule.relaxation_window)

    population_matrix = np.array(pops)
    t_arr = np.array(times)
    q_left = population_matrix @ (rates.left.T @ lam)
    q_right = population_matrix @ (rates.right.T @ lam)
    return TimeSeries(
        times=t_arr,
        populations=population_matrix,
        q_left=q_left,
        q_right=q_right,
        phase=tuple(phases),
        flags=APPROXIMATION_FLAGS,
    )
