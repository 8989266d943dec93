"""Figure rendering for the preset reports (PNG next to the data file)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import Table


def _save(fig, stem: Path) -> Path:
    out = stem.with_suffix(".png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _line_plot(table: Table, x: str, ys: list[str], xlabel: str, ylabel: str, stem: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = table.column(x)
    for name in ys:
        ax.plot(xs, table.column(name), label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, stem)


def _staircase_plot(table: Table, stem: Path) -> Path:
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(8, 5))
    ts = table.column("t")
    top.plot(ts, table.column("q_left"), label="q_left", color="tab:blue")
    top.plot(ts, table.column("q_right"), label="q_right", color="tab:red")
    top.set_ylabel("heat current")
    top.legend(fontsize=8)
    bottom.plot(ts, table.column("p22"), color="tab:green")
    bottom.set_ylabel("dark-level population")
    bottom.set_xlabel("t")
    fig.tight_layout()
    return _save(fig, stem)


def _rate_plane_plot(table: Table, contour: Table | None, stem: Path) -> Path:
    gm = np.array(table.column("gamma_minus"))
    gp = np.array(table.column("gamma_plus"))
    dq = np.array(table.column("delta_q_left"))
    n = int(round(len(gm) ** 0.5))
    fig, ax = plt.subplots(figsize=(6, 5))
    mesh = ax.pcolormesh(
        gp.reshape(n, n), gm.reshape(n, n), dq.reshape(n, n), shading="nearest", cmap="RdBu_r"
    )
    fig.colorbar(mesh, ax=ax, label="delta q_left")
    if contour is not None and contour.rows:
        ax.plot(contour.column("gamma_plus"), contour.column("gamma_minus_zero"),
                "k--", label="zero contour")
        ax.legend(fontsize=8)
    ax.set_xlabel("gamma_plus")
    ax.set_ylabel("gamma_minus")
    fig.tight_layout()
    return _save(fig, stem)


def render_preset_plot(kind: str, table: Table, sidecars: dict, stem: Path) -> Path:
    if kind in ("coupling", "delta_coupling"):
        return _line_plot(
            table, "g",
            ["q_left_common", "q_left_independent", "delta_q_left"],
            "g", "heat current", stem,
        )
    if kind == "temperature":
        return _line_plot(
            table, "t_left",
            ["q_left_common", "q_left_independent"],
            "T_L", "heat current", stem,
        )
    if kind == "staircase":
        return _staircase_plot(table, stem)
    if kind == "rate_plane":
        return _rate_plane_plot(table, sidecars.get("contour"), stem)
    if kind == "coa":
        return _line_plot(
            table, "t_left",
            ["q_left_detuned", "coa_detuned", "q_left_max_resonant", "coa_resonant_rho22_0"],
            "T_L", "value", stem,
        )
    raise ValueError(f"unknown plot kind {kind!r}")
