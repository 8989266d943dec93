"""Steady-state heat currents, channel decomposition, and parameter sweeps.

Sign convention: a heat current is positive when energy flows from the
reservoir into the system, so the hotter reservoir has a positive current at
steady state.  At stationarity the two currents cancel and the entropy
production rate -Q_L/T_L - Q_R/T_R is nonnegative.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from .dissipators import (
    RateMatrix,
    RateTable,
    Regime,
    RegimeMismatchError,
    ReservoirSpec,
    Scenario,
    Topology,
    bose_occupation,
    rate_matrix,
    spectral_density,
)
from .model import SystemParams
from .steadystate import (
    SteadyStateFamily,
    steady_state_closed_form,
    steady_state_family,
)

CONSERVATION_TOL = 1e-12
SECOND_LAW_TOL = 1e-12
# Currents this small are treated as zero when assigning inverse-flow flags.
SIGN_DEAD_ZONE = 1e-14


class InvariantViolationError(RuntimeError):
    """A computed report violates conservation or the second law."""


def heat_current(
    rates: RateMatrix, state: np.ndarray, label: str = "L", *, check_stationary: bool = True
) -> float:
    """Energy flow from reservoir ``label`` into the system, <lambda| M_alpha |rho>."""
    state = np.asarray(state, dtype=float)
    if check_stationary:
        residual = np.abs(rates.total @ state).max()
        if residual > 1e-8:
            warnings.warn(
                f"state is not stationary (|M rho| = {residual:.3e}); "
                "the value is a transient current",
                stacklevel=2,
            )
    lam = rates.scenario.eig.lambdas
    return float(lam @ (rates.per_reservoir(label) @ state))


def _signed_flag(channel: float, total: float) -> bool:
    if abs(channel) < SIGN_DEAD_ZONE or abs(total) < SIGN_DEAD_ZONE:
        return False
    return (channel > 0) != (total > 0)


@dataclass(frozen=True)
class HeatCurrentReport:
    """Per-reservoir total currents, the channel split, and inverse-flow flags."""

    q_left: float
    q_right: float
    q_left_direct: float | None = None
    q_left_cross: float | None = None
    q_right_direct: float | None = None
    q_right_cross: float | None = None
    delta: float | None = None
    inverse_flags: dict | None = None
    entropy_rate: float | None = None

    @property
    def conservation_defect(self) -> float:
        return self.q_left + self.q_right


def _entropy_rate(q_left: float, q_right: float, t_left: float, t_right: float) -> float | None:
    if t_left <= 0 or t_right <= 0:
        return None
    return -q_left / t_left - q_right / t_right


def _validate_report(report: HeatCurrentReport) -> None:
    if abs(report.conservation_defect) > CONSERVATION_TOL:
        raise InvariantViolationError(
            f"|Q_L + Q_R| = {abs(report.conservation_defect):.3e} exceeds {CONSERVATION_TOL}"
        )
    if report.entropy_rate is not None and report.entropy_rate < -SECOND_LAW_TOL:
        raise InvariantViolationError(
            f"entropy production rate {report.entropy_rate:.3e} below -{SECOND_LAW_TOL}"
        )
    for side, total, direct, cross in (
        ("L", report.q_left, report.q_left_direct, report.q_left_cross),
        ("R", report.q_right, report.q_right_direct, report.q_right_cross),
    ):
        if direct is not None and abs(direct + cross - total) > CONSERVATION_TOL:
            raise InvariantViolationError(
                f"channel additivity violated on {side}: |Qd + Qc - Q| = "
                f"{abs(direct + cross - total):.3e}"
            )


def steady_populations(scenario: Scenario, rho22: float | None = None) -> np.ndarray:
    """Steady population vector; the degenerate regime requires rho22."""
    rates = rate_matrix(scenario)
    if scenario.regime is Regime.RESONANT_DEGENERATE:
        if rho22 is None:
            raise ValueError(
                "degenerate resonant regime: pass rho22 to select a family member"
            )
        return steady_state_family(rates, rho22).populations
    return steady_state_closed_form(rates)


def heat_current_report(
    scenario: Scenario,
    state: np.ndarray | None = None,
    *,
    rho22: float | None = None,
    validate: bool = True,
) -> HeatCurrentReport:
    """Full current report on the steady state (or a supplied stationary state)."""
    rates = rate_matrix(scenario)
    if state is None:
        state = steady_populations(scenario, rho22)
    state = np.asarray(state, dtype=float)
    lam = scenario.eig.lambdas
    q_left = float(lam @ (rates.left @ state))
    q_right = float(lam @ (rates.right @ state))
    split = {}
    flags = None
    if scenario.topology is Topology.COMMON:
        split = {
            "q_left_direct": float(lam @ (rates.left_direct @ state)),
            "q_left_cross": float(lam @ (rates.left_cross @ state)),
            "q_right_direct": float(lam @ (rates.right_direct @ state)),
            "q_right_cross": float(lam @ (rates.right_cross @ state)),
        }
        flags = {
            "left_direct": _signed_flag(split["q_left_direct"], q_left),
            "left_cross": _signed_flag(split["q_left_cross"], q_left),
            "right_direct": _signed_flag(split["q_right_direct"], q_right),
            "right_cross": _signed_flag(split["q_right_cross"], q_right),
        }
    report = HeatCurrentReport(
        q_left=q_left,
        q_right=q_right,
        inverse_flags=flags,
        entropy_rate=_entropy_rate(
            q_left, q_right, scenario.left.temperature, scenario.right.temperature
        ),
        **split,
    )
    if validate:
        _validate_report(report)
    return report


# ---------------------------------------------------------------------------
# Closed-form currents (independent evaluation routes, regime by regime)
# ---------------------------------------------------------------------------


def _ladder_elements(gen: np.ndarray) -> dict:
    """The eight ladder elements M^{pq} (negative rates) of an arrow-pattern generator."""
    el = lambda p, q: -gen[q - 1, p - 1]
    return {
        "m12": el(1, 2), "m21": el(2, 1), "m34": el(3, 4), "m43": el(4, 3),
        "m13": el(1, 3), "m31": el(3, 1), "m24": el(2, 4), "m42": el(4, 2),
    }


def _current_ladder_form(el: dict, rho: np.ndarray, w_minus: float, w_plus: float) -> float:
    """Literal ladder-element current expression for one reservoir."""
    r1, r2, r3, r4 = rho
    low = el["m21"] * r2 + el["m43"] * r4 - el["m12"] * r1 - el["m34"] * r3
    high = el["m31"] * r3 + el["m42"] * r4 - el["m13"] * r1 - el["m24"] * r2
    return w_minus * low + w_plus * high


def _closed_common(scenario: Scenario) -> tuple[float, float]:
    rates = rate_matrix(scenario)
    rho = steady_state_closed_form(rates)
    eig = scenario.eig
    out = []
    for gen in (rates.left, rates.right):
        out.append(_current_ladder_form(_ladder_elements(gen), rho, eig.omega_minus, eig.omega_plus))
    return out[0], out[1]


def _independent_m_elements(scenario: Scenario, res: ReservoirSpec) -> tuple[float, float, float, float]:
    """Per-reservoir rate combinations for qubits without shared-bath terms."""
    eig = scenario.eig
    sp2 = math.sin(eig.theta_plus) ** 2
    cp2 = math.cos(eig.theta_plus) ** 2
    sm2 = math.sin(eig.theta_minus) ** 2
    cm2 = math.cos(eig.theta_minus) ** 2
    j = lambda m, sign, slot: spectral_density(
        res, m, m, eig.omega_minus if slot == 0 else eig.omega_plus, sign, slot
    )
    m1 = -2.0 * (sp2 * j(1, +1, 0) + cm2 * j(2, +1, 0))
    m2 = -2.0 * (cp2 * j(1, +1, 1) + sm2 * j(2, +1, 1))
    m3 = -2.0 * (sp2 * j(1, -1, 0) + cm2 * j(2, -1, 0))
    m4 = -2.0 * (cp2 * j(1, -1, 1) + sm2 * j(2, -1, 1))
    return m1, m2, m3, m4


def _closed_independent(scenario: Scenario) -> tuple[float, float]:
    """Product-form steady state and the simplified current expression."""
    eig = scenario.eig
    per_res = {res.label: _independent_m_elements(scenario, res) for res in scenario.reservoirs}
    m1, m2, m3, m4 = (sum(per_res[lab][k] for lab in ("L", "R")) for k in range(4))
    raw = np.array([m3 * m4, m1 * m4, m2 * m3, m1 * m2])
    rho = raw / raw.sum()
    out = []
    for lab in ("L", "R"):
        a1, a2, a3, a4 = per_res[lab]
        q = eig.omega_minus * (a3 * (rho[1] + rho[3]) - a1 * (rho[0] + rho[2]))
        q += eig.omega_plus * (a4 * (rho[2] + rho[3]) - a2 * (rho[0] + rho[1]))
        out.append(q)
    return out[0], out[1]


def _bare_slots(params: SystemParams) -> tuple[int, int]:
    """Rate-table slots of the bare frequencies for uncoupled qubits."""
    return (0, 1) if params.omega1 <= params.omega2 else (1, 0)


def _closed_uncoupled(scenario: Scenario) -> tuple[float, float]:
    """Fully reduced two-independent-atoms expression (g = 0)."""
    params = scenario.params
    slots = _bare_slots(params)
    omegas = (params.omega1, params.omega2)
    q = {"L": 0.0, "R": 0.0}
    for m in (1, 2):
        omega, slot = omegas[m - 1], slots[m - 1]
        jj = {
            res.label: {
                "+": -2.0 * spectral_density(res, m, m, omega, +1, slot),
                "-": -2.0 * spectral_density(res, m, m, omega, -1, slot),
            }
            for res in scenario.reservoirs
        }
        j_plus = jj["L"]["+"] + jj["R"]["+"]
        j_minus = jj["L"]["-"] + jj["R"]["-"]
        denom = j_plus + j_minus
        if denom == 0:
            continue
        for lab in ("L", "R"):
            q[lab] += omega * (jj[lab]["-"] * j_plus - jj[lab]["+"] * j_minus) / denom
    return q["L"], q["R"]


def _uncoupled_resonant_elements(res: ReservoirSpec, omega: float) -> tuple[float, float, float, float]:
    """Collective singlet/triplet rate combinations for g = 0 on resonance."""
    j11p = spectral_density(res, 1, 1, omega, +1, 0)
    j22p = spectral_density(res, 2, 2, omega, +1, 0)
    j11m = spectral_density(res, 1, 1, omega, -1, 0)
    j22m = spectral_density(res, 2, 2, omega, -1, 0)
    s1 = -((math.sqrt(j11p) - math.sqrt(j22p)) ** 2)
    s2 = -((math.sqrt(j11p) + math.sqrt(j22p)) ** 2)
    s3 = -((math.sqrt(j11m) - math.sqrt(j22m)) ** 2)
    s4 = -((math.sqrt(j11m) + math.sqrt(j22m)) ** 2)
    return s1, s2, s3, s4


def _closed_uncoupled_resonant(scenario: Scenario) -> tuple[float, float]:
    """Common-bath, g = 0, equal frequencies, unequal per-qubit rates."""
    omega = scenario.params.omega1
    per_res = {res.label: _uncoupled_resonant_elements(res, omega) for res in scenario.reservoirs}
    tot = [sum(per_res[lab][k] for lab in ("L", "R")) for k in range(4)]
    gen = np.zeros((4, 4))
    # Ladder mapping: M12 = M24 = S1, M13 = M34 = S2, M21 = M42 = S3, M31 = M43 = S4.
    mapping = {
        (1, 2): 0, (2, 4): 0, (1, 3): 1, (3, 4): 1,
        (2, 1): 2, (4, 2): 2, (3, 1): 3, (4, 3): 3,
    }
    for (p, q_lvl), idx in mapping.items():
        rate = -tot[idx]
        gen[q_lvl - 1, p - 1] += rate
        gen[p - 1, p - 1] -= rate
    rho = steady_state_closed_form(gen)
    out = []
    for lab in ("L", "R"):
        s1, s2, s3, s4 = per_res[lab]
        el = {
            "m12": s1, "m24": s1, "m13": s2, "m34": s2,
            "m21": s3, "m42": s3, "m31": s4, "m43": s4,
        }
        out.append(_current_ladder_form(el, rho, omega, omega))
    return out[0], out[1]


def heat_current_closed(scenario: Scenario) -> HeatCurrentReport:
    """Closed-form steady currents for the scenario's regime.

    The degenerate resonant regime has a one-parameter current and is served
    by :func:`max_heat_current_degenerate` instead.
    """
    regime = scenario.regime
    if regime in (Regime.DETUNED_COUPLED, Regime.RESONANT_COUPLED):
        q_left, q_right = _closed_common(scenario)
    elif regime is Regime.UNCOUPLED_DETUNED:
        q_left, q_right = _closed_uncoupled(scenario)
    elif regime is Regime.UNCOUPLED_RESONANT:
        q_left, q_right = _closed_uncoupled_resonant(scenario)
    elif regime is Regime.UNCOUPLED_INDEPENDENT:
        if scenario.params.g == 0:
            q_left, q_right = _closed_uncoupled(scenario)
        else:
            q_left, q_right = _closed_independent(scenario)
    else:
        raise RegimeMismatchError(
            "degenerate resonant regime: use max_heat_current_degenerate and the family"
        )
    report = HeatCurrentReport(
        q_left=q_left,
        q_right=q_right,
        entropy_rate=_entropy_rate(
            q_left, q_right, scenario.left.temperature, scenario.right.temperature
        ),
    )
    _validate_report(report)
    return report


def _degenerate_elements(scenario: Scenario, res: ReservoirSpec) -> tuple[float, float, float, float]:
    """Collective rates of the equal-rate resonant case (dark level decoupled)."""
    eig = scenario.eig
    c2 = math.cos(eig.theta_plus) ** 2
    s2 = math.sin(eig.theta_plus) ** 2
    w1 = -8.0 * c2 * spectral_density(res, 1, 1, eig.omega_plus, +1, 1)
    w2 = -8.0 * c2 * spectral_density(res, 1, 1, eig.omega_plus, -1, 1)
    w3 = -8.0 * s2 * spectral_density(res, 1, 1, eig.omega_minus, +1, 0)
    w4 = -8.0 * s2 * spectral_density(res, 1, 1, eig.omega_minus, -1, 0)
    return w1, w2, w3, w4


def _require_degenerate(scenario: Scenario) -> None:
    if scenario.regime is not Regime.RESONANT_DEGENERATE:
        raise RegimeMismatchError(
            f"expected the degenerate resonant regime, got {scenario.regime.value}"
        )


def max_heat_current_degenerate(scenario: Scenario, label: str = "L") -> float:
    """Largest steady current of the family (attained at rho22 = 0)."""
    _require_degenerate(scenario)
    eig = scenario.eig
    per = {res.label: _degenerate_elements(scenario, res) for res in scenario.reservoirs}
    w1, w2, w3, w4 = (per["L"][k] + per["R"][k] for k in range(4))
    a1, a2, a3, a4 = per[label]
    norm = w2 * w4 + w1 * w4 + w1 * w3
    return (eig.omega_minus * w1 / norm) * (a4 * w3 - a3 * w4) + (
        eig.omega_plus * w4 / norm
    ) * (a2 * w1 - a1 * w2)


def max_heat_current_degenerate_uncoupled(scenario: Scenario, label: str = "L") -> float:
    """Uncoupled (g = 0) variant of the maximal degenerate current."""
    _require_degenerate(scenario)
    if scenario.params.g != 0:
        raise RegimeMismatchError("the uncoupled closed form requires g = 0")
    omega = scenario.params.omega1
    jj = {
        res.label: {
            "+": -2.0 * spectral_density(res, 1, 1, omega, +1, 0),
            "-": -2.0 * spectral_density(res, 1, 1, omega, -1, 0),
        }
        for res in scenario.reservoirs
    }
    j_plus = jj["L"]["+"] + jj["R"]["+"]
    j_minus = jj["L"]["-"] + jj["R"]["-"]
    norm = j_minus**2 + j_minus * j_plus + j_plus**2
    return (
        2.0 * omega / norm * (j_plus + j_minus)
        * (jj[label]["-"] * j_plus - jj[label]["+"] * j_minus)
    )


def channel_decomposition(
    scenario: Scenario, state: np.ndarray | None = None, *, rho22: float | None = None
) -> dict:
    """Direct and crossing channel currents per reservoir, {label: (direct, cross)}."""
    if scenario.topology is not Topology.COMMON:
        raise RegimeMismatchError("channel decomposition requires common reservoirs")
    rates = rate_matrix(scenario)
    if state is None:
        state = steady_populations(scenario, rho22)
    state = np.asarray(state, dtype=float)
    lam = scenario.eig.lambdas
    return {
        "L": (float(lam @ (rates.left_direct @ state)), float(lam @ (rates.left_cross @ state))),
        "R": (float(lam @ (rates.right_direct @ state)), float(lam @ (rates.right_cross @ state))),
    }


def channel_currents_closed_detuned(
    scenario: Scenario, state: np.ndarray, label: str = "L"
) -> tuple[float, float]:
    """Literal detuned-case channel expressions on a given steady state.

    The crossing part uses the matrix-split sign convention, which satisfies
    additivity with the total current and reproduces the equal-rate
    hyperbolic-cotangent form exactly.
    """
    eig = scenario.eig
    res = scenario.left if label == "L" else scenario.right
    m1, m2, m3, m4 = _independent_m_elements(scenario, res)
    sp, cp = math.sin(eig.theta_plus), math.cos(eig.theta_plus)
    sm, cm = math.sin(eig.theta_minus), math.cos(eig.theta_minus)
    j = lambda m, n, sign, slot: spectral_density(
        res, m, n, eig.omega_minus if slot == 0 else eig.omega_plus, sign, slot
    )
    xi1 = 4.0 * sp * cm * math.sqrt(j(1, 1, +1, 0) * j(2, 2, +1, 0))
    xi3 = 4.0 * sp * cm * math.sqrt(j(1, 1, -1, 0) * j(2, 2, -1, 0))
    xi2 = 4.0 * cp * sm * math.sqrt(j(1, 1, +1, 1) * j(2, 2, +1, 1))
    xi4 = 4.0 * cp * sm * math.sqrt(j(1, 1, -1, 1) * j(2, 2, -1, 1))
    r1, r2, r3, r4 = state
    direct = eig.omega_minus * (m3 * (r2 + r4) - m1 * (r1 + r3))
    direct += eig.omega_plus * (m4 * (r3 + r4) - m2 * (r1 + r2))
    cross = eig.omega_minus * (xi3 * (r2 - r4) - xi1 * (r1 - r3))
    cross += eig.omega_plus * (xi4 * (r4 - r3) + xi2 * (r1 - r2))
    return direct, cross


def channel_currents_closed_degenerate(
    scenario: Scenario, rho22: float, label: str = "L"
) -> tuple[float, float]:
    """Literal degenerate-case channel expressions, linear in rho22."""
    _require_degenerate(scenario)
    eig = scenario.eig
    per = {res.label: _degenerate_elements(scenario, res) for res in scenario.reservoirs}
    w1, w2, w3, w4 = (per["L"][k] + per["R"][k] for k in range(4))
    a1, a2, a3, a4 = per[label]
    norm = w2 * w4 + w1 * w4 + w1 * w3
    wm, wp = eig.omega_minus, eig.omega_plus
    resid_d = wm * (a4 * w1 * w3 - a3 * w4 * (w1 + w2)) - wp * (
        a1 * w2 * w4 - a2 * w1 * (w4 + w3)
    )
    resid_c = wm * (a4 * w1 * w3 - a3 * w4 * (w1 - w2)) - wp * (
        a1 * w2 * w4 - a2 * w1 * (w4 - w3)
    )
    dark_term = 0.5 * (wm * a4 - wp * a1)
    direct = (1.0 - rho22) / (2.0 * norm) * resid_d + rho22 * dark_term
    cross = (1.0 - rho22) / (2.0 * norm) * resid_c - rho22 * dark_term
    return direct, cross


def cross_current_equal_rate(scenario: Scenario, label: str = "L") -> float:
    """Hyperbolic-cotangent closed form of the crossing current, uniform rates.

    Requires a detuned common-reservoir scenario with gamma^{mn}(omega_i)
    identical across reservoirs at each transition energy.
    """
    if scenario.topology is not Topology.COMMON or scenario.params.is_resonant():
        raise RegimeMismatchError("the equal-rate closed form needs detuned common reservoirs")
    lt, rt = scenario.left.rates, scenario.right.rates
    if not (lt.is_uniform and rt.is_uniform and lt == rt):
        raise RegimeMismatchError("rates must be uniform and reservoir independent")
    eig = scenario.eig
    gam_minus, gam_plus = lt.gamma11
    t_hot, t_cold = scenario.left.temperature, scenario.right.temperature
    if label == "R":
        t_hot, t_cold = t_cold, t_hot
    n_minus = sum(bose_occupation(eig.omega_minus, t) for t in (t_hot, t_cold))
    n_plus = sum(bose_occupation(eig.omega_plus, t) for t in (t_hot, t_cold))
    norm = (n_minus + 2.0) * (n_plus + 2.0) + n_minus * (n_plus + 2.0)
    norm += (n_minus + 2.0) * n_plus + n_minus * n_plus
    ss, cs = math.sin(eig.theta_s), math.cos(eig.theta_s)
    sd, cd = math.sin(eig.theta_d), math.cos(eig.theta_d)
    coth = lambda x: 1.0 / math.tanh(x)
    du_minus = coth(eig.omega_minus / (2.0 * t_cold)) - coth(eig.omega_minus / (2.0 * t_hot))
    du_plus = coth(eig.omega_plus / (2.0 * t_cold)) - coth(eig.omega_plus / (2.0 * t_hot))
    return (4.0 / norm) * (
        gam_minus * eig.omega_minus * (cs * ss + cd * sd) * du_minus
        + gam_plus * eig.omega_plus * (cs * ss - cd * sd) * du_plus
    )


def delta_current(scenario_common: Scenario, scenario_independent: Scenario) -> float:
    """Difference Q_L(independent) - Q_L(common) for matched parameters."""
    if scenario_common.topology is not Topology.COMMON:
        raise ValueError("first scenario must use common reservoirs")
    if scenario_independent.topology is not Topology.INDEPENDENT:
        raise ValueError("second scenario must use independent reservoirs")
    same = (
        scenario_common.params == scenario_independent.params
        and scenario_common.left == scenario_independent.left
        and scenario_common.right == scenario_independent.right
    )
    if not same:
        raise ValueError("scenarios must share parameters, temperatures, and rates")
    q_common = heat_current_report(scenario_common).q_left
    q_independent = heat_current_report(scenario_independent).q_left
    return q_independent - q_common


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

AXIS_NAMES = ("T_L", "T_R", "g", "omega1", "omega2", "gamma", "gamma_minus", "gamma_plus", "rho22")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown sweep axis {self.name!r}; valid: {AXIS_NAMES}")
        if len(self.values) == 0:
            raise ValueError("sweep axis needs at least one value")
        lo = min(self.values)
        if self.name in ("T_L", "T_R", "gamma", "gamma_minus", "gamma_plus", "g", "rho22") and lo < 0:
            raise ValueError(f"axis {self.name}: values must be nonnegative, got {lo}")
        if self.name in ("omega1", "omega2") and lo <= 0:
            raise ValueError(f"axis {self.name}: frequencies must be positive, got {lo}")
        if self.name == "rho22" and max(self.values) > 1:
            raise ValueError("axis rho22: values must lie in [0, 1]")

    @classmethod
    def linspace(cls, name: str, start: float, stop: float, points: int) -> "SweepAxis":
        return cls(name, tuple(float(v) for v in np.linspace(start, stop, points)))


@dataclass(frozen=True)
class SweepResult:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def _uniform_gammas(table: RateTable) -> tuple[float, float]:
    if not table.is_uniform:
        raise ValueError("gamma sweep axes require a uniform rate table")
    return table.gamma11


def _with_axis(scenario: Scenario, name: str, value: float) -> Scenario:
    params = scenario.params
    if name == "T_L":
        return replace(scenario, left=replace(scenario.left, temperature=value))
    if name == "T_R":
        return replace(scenario, right=replace(scenario.right, temperature=value))
    if name == "g":
        return replace(scenario, params=replace(params, g=value))
    if name == "omega1":
        return replace(scenario, params=replace(params, omega1=value))
    if name == "omega2":
        return replace(scenario, params=replace(params, omega2=value))
    if name in ("gamma", "gamma_minus", "gamma_plus"):
        new_res = []
        for res in scenario.reservoirs:
            gm, gp = _uniform_gammas(res.rates)
            if name == "gamma":
                gm = gp = value
            elif name == "gamma_minus":
                gm = value
            else:
                gp = value
            new_res.append(replace(res, rates=RateTable.per_frequency(gm, gp)))
        return replace(scenario, left=new_res[0], right=new_res[1])
    raise ValueError(f"axis {name!r} does not modify the scenario")


SWEEP_COLUMNS = (
    "q_left",
    "q_right",
    "q_left_direct",
    "q_left_cross",
    "q_right_direct",
    "q_right_cross",
    "delta_q_left",
    "p11",
    "p22",
    "p33",
    "p44",
)


def _evaluate_point(scenario: Scenario, rho22: float | None, include_delta: bool) -> tuple:
    state = steady_populations(scenario, rho22)
    report = heat_current_report(scenario, state)
    if scenario.topology is Topology.COMMON:
        split = (
            report.q_left_direct,
            report.q_left_cross,
            report.q_right_direct,
            report.q_right_cross,
        )
    else:
        split = (report.q_left, 0.0, report.q_right, 0.0)
    delta = ""
    if include_delta:
        if scenario.regime is Regime.RESONANT_DEGENERATE:
            raise ValueError("delta current is undefined in the degenerate resonant regime")
        common = scenario if scenario.topology is Topology.COMMON else scenario.twin(Topology.COMMON)
        independent = scenario.twin(Topology.INDEPENDENT)
        delta = delta_current(common, independent)
    return (report.q_left, report.q_right, *split, delta, *state)


def sweep(
    scenario: Scenario,
    axes: list[SweepAxis],
    *,
    include_delta: bool = False,
    threads: int = 1,
) -> SweepResult:
    """Row-per-grid-point evaluation over one or two axes.

    The grid is the row-major product of the axis values; the output order
    and content are independent of ``threads``.
    """
    if not 1 <= len(axes) <= 2:
        raise ValueError("sweep supports one or two axes")
    names = [ax.name for ax in axes]
    if len(set(names)) != len(names):
        raise ValueError("sweep axes must be distinct")

    grid = list(product(*(ax.values for ax in axes)))

    def evaluate(point):
        current = scenario
        rho22 = None
        for name, value in zip(names, point):
            if name == "rho22":
                rho22 = value
            else:
                current = _with_axis(current, name, value)
        return (*point, *_evaluate_point(current, rho22, include_delta))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(evaluate, grid))
    else:
        rows = [evaluate(point) for point in grid]
    columns = (*names, *SWEEP_COLUMNS)
    return SweepResult(columns=columns, rows=tuple(rows))
