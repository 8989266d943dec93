"""Reproducible report presets over the reference parameter sets.

Every preset is a deterministic data table (plus, for the rate-plane preset,
a zero-contour sidecar).  Grids that a preset chooses freely, such as the
temperature range of the entanglement scan, are reproduction choices and are
recorded in the preset description.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipators import RateTable, ReservoirSpec, Scenario, Topology
from .entanglement import coa_detuned_closed, coa_resonant_closed
from .model import SystemParams
from .modulator import build_staircase_schedule, run_schedule
from .steadystate import DARK_STATE
from .transport import (
    SweepAxis,
    delta_current,
    heat_current_report,
    max_heat_current_degenerate,
    steady_populations,
    sweep,
)
from .tables import Table

# Reference parameters shared by the presets: omega1 = 3, omega2 = 4
# (omega = 3 on resonance), g = 0.3, flat rate 0.003, T_R = 21, T_L = 100.
BASE_RATE = 0.003
T_LEFT = 100.0
T_RIGHT = 21.0


def _scenario(omega1=3.0, omega2=4.0, g=0.3, t_left=T_LEFT, t_right=T_RIGHT,
              gamma_minus=BASE_RATE, gamma_plus=BASE_RATE,
              topology=Topology.COMMON) -> Scenario:
    return Scenario(
        params=SystemParams(omega1=omega1, omega2=omega2, g=g),
        topology=topology,
        left=ReservoirSpec("L", t_left, RateTable.per_frequency(gamma_minus, gamma_plus)),
        right=ReservoirSpec("R", t_right, RateTable.per_frequency(gamma_minus, gamma_plus)),
    )


@dataclass(frozen=True)
class PresetOutput:
    table: Table
    sidecars: dict
    plot_kind: str
    description: str


def _coupling_sweep(description: str) -> PresetOutput:
    rows = []
    for g in np.linspace(0.0, 3.0, 121):
        common = _scenario(g=float(g))
        independent = common.twin(Topology.INDEPENDENT)
        state = steady_populations(common)
        q_common = heat_current_report(common, state).q_left
        q_indep = heat_current_report(independent).q_left
        rows.append((float(g), q_common, q_indep, q_indep - q_common, *state))
    return PresetOutput(
        table=Table(
            columns=("g", "q_left_common", "q_left_independent", "delta_q_left",
                     "p11", "p22", "p33", "p44"),
            rows=tuple(rows),
        ),
        sidecars={},
        plot_kind="coupling",
        description=description,
    )


def preset_fig2a() -> PresetOutput:
    return _coupling_sweep(
        "heat current and steady populations vs coupling strength g in [0, 3]; "
        "omega1=3, omega2=4, T_L=100, T_R=21, rates 0.003"
    )


def preset_fig2b() -> PresetOutput:
    rows = []
    for t_left in np.linspace(1.0, 199.0, 100):
        common = _scenario(t_left=float(t_left))
        independent = common.twin(Topology.INDEPENDENT)
        state = steady_populations(common)
        q_common = heat_current_report(common, state).q_left
        q_indep = heat_current_report(independent).q_left
        rows.append((float(t_left), q_common, q_indep, q_indep - q_common, *state))
    return PresetOutput(
        table=Table(
            columns=("t_left", "q_left_common", "q_left_independent", "delta_q_left",
                     "p11", "p22", "p33", "p44"),
            rows=tuple(rows),
        ),
        sidecars={},
        plot_kind="temperature",
        description="heat current and steady populations vs T_L in [1, 199] (includes "
                    "T_L = T_R = 21); omega1=3, omega2=4, g=0.3, rates 0.003",
    )


def preset_fig3() -> PresetOutput:
    out = _coupling_sweep(
        "common vs independent reservoir currents and their difference vs g in [0, 3]; "
        "omega1=3, omega2=4, T_L=100, T_R=21, rates 0.003"
    )
    return PresetOutput(
        table=out.table, sidecars={}, plot_kind="delta_coupling", description=out.description
    )


def preset_fig4() -> PresetOutput:
    scenario = _scenario(omega1=3.0, omega2=3.0)
    schedule = build_staircase_schedule(
        scenario, targets=[0.7, 0.3, 0.0, 0.2, 0.4], omega_r=0.5 * math.pi, window=50.0
    )
    series = run_schedule(scenario, schedule, DARK_STATE.copy())
    q_max = max_heat_current_degenerate(scenario)
    rows = tuple(
        (float(t), *map(float, p), float(ql), float(qr), phase)
        for t, p, ql, qr, phase in zip(
            series.times, series.populations, series.q_left, series.q_right, series.phase
        )
    )
    return PresetOutput(
        table=Table(
            columns=("t", "p11", "p22", "p33", "p44", "q_left", "q_right", "phase"),
            rows=rows,
        ),
        sidecars={
            "meta": Table(
                columns=("q_left_max", "flags"),
                rows=((q_max, "; ".join(series.flags)),),
            )
        },
        plot_kind="staircase",
        description="drive/relax staircase through rho22 = 1, 0.7, 0.3, 0, 0.2, 0.4; "
                    "omega=3, g=0.3, rate 0.003, T_L=100, T_R=21, drive frequency pi/2, "
                    "relaxation window 50",
    )


def _contour_rows(gammas_minus, gammas_plus, delta_grid):
    """Zero crossings of the current difference along the gamma_- axis."""
    rows = []
    for j, gp in enumerate(gammas_plus):
        column = delta_grid[:, j]
        for i in range(len(gammas_minus) - 1):
            a, b = column[i], column[i + 1]
            if a == 0.0:
                root = gammas_minus[i]
            elif a * b < 0:
                root = gammas_minus[i] - a * (gammas_minus[i + 1] - gammas_minus[i]) / (b - a)
            else:
                continue
            rows.append((float(gp), float(root), float(root / gp)))
            break
    return tuple(rows)


def preset_fig5() -> PresetOutput:
    gammas = np.linspace(0.0005, 0.006, 23)
    result = sweep(
        _scenario(),
        [SweepAxis("gamma_minus", tuple(map(float, gammas))),
         SweepAxis("gamma_plus", tuple(map(float, gammas)))],
        include_delta=True,
    )
    delta_idx = result.columns.index("delta_q_left")
    delta_grid = np.array([row[delta_idx] for row in result.rows]).reshape(
        len(gammas), len(gammas)
    )
    contour = Table(
        columns=("gamma_plus", "gamma_minus_zero", "ratio"),
        rows=_contour_rows(gammas, gammas, delta_grid),
    )
    return PresetOutput(
        table=Table(columns=result.columns, rows=result.rows),
        sidecars={"contour": contour},
        plot_kind="rate_plane",
        description="difference of independent- and common-reservoir currents over the "
                    "(gamma_-, gamma_+) plane with the zero contour extracted; omega1=3, "
                    "omega2=4, g=0.3, T_L=100, T_R=21",
    )


def preset_fig6() -> PresetOutput:
    rows = []
    for t_left in np.linspace(30.0, 200.0, 50):
        detuned = _scenario(t_left=float(t_left))
        state = steady_populations(detuned)
        q_detuned = heat_current_report(detuned, state).q_left
        coa_detuned = coa_detuned_closed(state, detuned.eig)
        resonant = _scenario(omega1=3.0, omega2=3.0, t_left=float(t_left))
        q_resonant_max = max_heat_current_degenerate(resonant)
        coa_resonant = coa_resonant_closed(0.0, resonant)
        rows.append(
            (float(t_left), q_detuned, coa_detuned, q_resonant_max, coa_resonant)
        )
    return PresetOutput(
        table=Table(
            columns=("t_left", "q_left_detuned", "coa_detuned",
                     "q_left_max_resonant", "coa_resonant_rho22_0"),
            rows=tuple(rows),
        ),
        sidecars={},
        plot_kind="coa",
        description="entanglement of assistance and heat current vs T_L on a [30, 200] "
                    "grid (50 points, reproduction choice); detuned omega1=3, omega2=4 "
                    "and resonant omega=3 cases, g=0.3, rate 0.003, T_R=21",
    )


PRESETS = {
    "fig2a": preset_fig2a,
    "fig2b": preset_fig2b,
    "fig3": preset_fig3,
    "fig4": preset_fig4,
    "fig5": preset_fig5,
    "fig6": preset_fig6,
}


def build_preset(name: str) -> PresetOutput:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; valid: {', '.join(sorted(PRESETS))}")
    return builder()
