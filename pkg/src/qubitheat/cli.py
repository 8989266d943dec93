"""Command line front end: config parsing, report subcommands, deterministic emission.

Exit codes: 0 success, 1 usage error, 2 config error, 3 numeric or invariant
failure.  The JSON config schema is documented in the README; validation
reports every violation, not just the first.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dissipators import (
    RateTable,
    Regime,
    RegimeMismatchError,
    ReservoirSpec,
    Scenario,
    Topology,
)
from .entanglement import coa_detuned_closed, coa_general, coa_resonant_closed, resonant_intercept
from .model import SystemParams, to_bare_basis
from .modulator import build_staircase_schedule, run_schedule
from .presets import PRESETS, build_preset
from .steadystate import DARK_STATE
from .tables import DEFAULT_PRECISION, Table, write_table
from .transport import (
    InvariantViolationError,
    SweepAxis,
    channel_decomposition,
    heat_current_closed,
    heat_current_report,
    steady_populations,
    sweep,
)
from .validation import run_validation

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SUBCOMMANDS = ("steady", "currents", "channels", "sweep", "modulate", "coa", "validate", "preset")


class ConfigError(Exception):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario
    command: dict
    output: dict


def _expect_number(errors, obj, path, minimum=None, strict=False, default=None):
    if obj is None:
        if default is not None:
            return default
        errors.append(f"{path}: missing required number")
        return None
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        errors.append(f"{path}: expected a number, got {type(obj).__name__}")
        return None
    v = float(obj)
    if minimum is not None and (v <= minimum if strict else v < minimum):
        op = ">" if strict else ">="
        errors.append(f"{path}: must be {op} {minimum}, got {v}")
        return None
    return v


def _parse_rates(errors, block, path):
    if not isinstance(block, dict):
        errors.append(f"{path}: expected an object")
        return None
    keys = set(block)
    try:
        if keys <= {"gamma"}:
            g = _expect_number(errors, block.get("gamma"), f"{path}.gamma", minimum=0.0)
            return None if g is None else RateTable.flat(g)
        if keys <= {"gamma_minus", "gamma_plus"}:
            gm = _expect_number(errors, block.get("gamma_minus"), f"{path}.gamma_minus", minimum=0.0)
            gp = _expect_number(errors, block.get("gamma_plus"), f"{path}.gamma_plus", minimum=0.0)
            if gm is None or gp is None:
                return None
            return RateTable.per_frequency(gm, gp)
        if {"gamma11", "gamma22"} <= keys <= {"gamma11", "gamma22", "gamma12"}:
            pairs = {}
            for name in ("gamma11", "gamma22", "gamma12"):
                if name == "gamma12" and name not in block:
                    pairs[name] = None
                    continue
                pair = block.get(name)
                if (
                    not isinstance(pair, (list, tuple))
                    or len(pair) != 2
                    or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)
                ):
                    errors.append(f"{path}.{name}: expected a pair of numbers")
                    return None
                pairs[name] = (float(pair[0]), float(pair[1]))
            return RateTable(gamma11=pairs["gamma11"], gamma22=pairs["gamma22"],
                             gamma12=pairs["gamma12"])
    except ValueError as exc:
        errors.append(f"{path}: {exc}")
        return None
    errors.append(
        f"{path}: use one of {{gamma}}, {{gamma_minus, gamma_plus}}, "
        f"{{gamma11, gamma22[, gamma12]}}; got keys {sorted(keys)}"
    )
    return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration, collecting all violations."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"])
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected an object"])

    scen = raw.get("scenario")
    scenario = None
    if not isinstance(scen, dict):
        errors.append("scenario: missing or not an object")
    else:
        omega1 = _expect_number(errors, scen.get("omega1"), "scenario.omega1", minimum=0.0, strict=True)
        omega2 = _expect_number(errors, scen.get("omega2"), "scenario.omega2", minimum=0.0, strict=True)
        g = _expect_number(errors, scen.get("g", 0.0), "scenario.g", minimum=0.0)
        topology_raw = scen.get("topology", "common")
        topology = None
        if topology_raw not in ("common", "independent"):
            errors.append(f"scenario.topology: must be 'common' or 'independent', got {topology_raw!r}")
        else:
            topology = Topology(topology_raw)
        temps = scen.get("temperatures")
        t_left = t_right = None
        if not isinstance(temps, dict):
            errors.append("scenario.temperatures: missing or not an object")
        else:
            t_left = _expect_number(errors, temps.get("left"), "scenario.temperatures.left", minimum=0.0)
            t_right = _expect_number(errors, temps.get("right"), "scenario.temperatures.right", minimum=0.0)
        rates = _parse_rates(errors, scen.get("rates"), "scenario.rates")
        if not errors:
            try:
                scenario = Scenario(
                    params=SystemParams(omega1=omega1, omega2=omega2, g=g),
                    topology=topology,
                    left=ReservoirSpec("L", t_left, rates),
                    right=ReservoirSpec("R", t_right, rates),
                )
            except ValueError as exc:
                errors.append(f"scenario: {exc}")

    command = raw.get("command", {})
    if not isinstance(command, dict):
        errors.append("command: expected an object")
        command = {}
    output = raw.get("output", {})
    if not isinstance(output, dict):
        errors.append("output: expected an object")
        output = {}
    fmt = output.get("format", "csv")
    if fmt not in ("csv", "json"):
        errors.append(f"output.format: must be 'csv' or 'json', got {fmt!r}")
    precision = output.get("precision", DEFAULT_PRECISION)
    if isinstance(precision, bool) or not isinstance(precision, int) or not 1 <= precision <= 17:
        errors.append(f"output.precision: must be an integer in [1, 17], got {precision!r}")

    if errors:
        raise ConfigError(errors)
    return RunConfig(scenario=scenario, command=command, output=dict(output))


def _parse_axes(command) -> list[SweepAxis]:
    axes_raw = command.get("axes")
    if not isinstance(axes_raw, list) or not 1 <= len(axes_raw) <= 2:
        raise ConfigError(["command.axes: expected a list of one or two axis objects"])
    axes = []
    for i, ax in enumerate(axes_raw):
        path = f"command.axes[{i}]"
        if not isinstance(ax, dict) or "name" not in ax:
            raise ConfigError([f"{path}: expected an object with a 'name'"])
        try:
            if "values" in ax:
                axes.append(SweepAxis(ax["name"], tuple(float(v) for v in ax["values"])))
            else:
                axes.append(
                    SweepAxis.linspace(ax["name"], float(ax["start"]), float(ax["stop"]), int(ax["points"]))
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError([f"{path}: {exc}"])
    return axes


def _need_rho22(config: RunConfig):
    rho22 = config.command.get("rho22")
    if config.scenario.regime is Regime.RESONANT_DEGENERATE:
        if rho22 is None:
            raise ConfigError(
                ["command.rho22: required in the degenerate resonant regime (steady-state family)"]
            )
        if not isinstance(rho22, (int, float)) or isinstance(rho22, bool) or not 0 <= rho22 <= 1:
            raise ConfigError([f"command.rho22: must be a number in [0, 1], got {rho22!r}"])
        return float(rho22)
    return None


def _run_steady(config: RunConfig) -> Table:
    rho22 = _need_rho22(config)
    state = steady_populations(config.scenario, rho22)
    bare = to_bare_basis(state, config.scenario.eig)
    return Table(
        columns=("regime", "rho22", "p11", "p22", "p33", "p44",
                 "bare_uu", "bare_ud", "bare_du", "bare_dd"),
        rows=(
            (
                config.scenario.regime.value,
                "" if rho22 is None else rho22,
                *map(float, state),
                *(float(np.real(bare[i, i])) for i in range(4)),
            ),
        ),
    )


def _run_currents(config: RunConfig) -> Table:
    rho22 = _need_rho22(config)
    report = heat_current_report(config.scenario, rho22=rho22)
    deviation = ""
    if config.scenario.regime is not Regime.RESONANT_DEGENERATE:
        closed = heat_current_closed(config.scenario)
        deviation = abs(closed.q_left - report.q_left)
        if deviation > 1e-12:
            raise InvariantViolationError(
                f"closed-form current deviates from the generic route by {deviation:.3e}"
            )
    return Table(
        columns=("q_left", "q_right", "entropy_rate", "conservation_defect",
                 "closed_form_deviation"),
        rows=((report.q_left, report.q_right,
               "" if report.entropy_rate is None else report.entropy_rate,
               report.conservation_defect, deviation),),
    )


def _run_channels(config: RunConfig) -> Table:
    rho22 = _need_rho22(config)
    if config.scenario.topology is not Topology.COMMON:
        raise ConfigError(["scenario.topology: channel decomposition requires common reservoirs"])
    report = heat_current_report(config.scenario, rho22=rho22)
    flags = report.inverse_flags
    return Table(
        columns=(
            "q_left", "q_left_direct", "q_left_cross",
            "q_right", "q_right_direct", "q_right_cross",
            "inverse_left_direct", "inverse_left_cross",
            "inverse_right_direct", "inverse_right_cross",
        ),
        rows=((
            report.q_left, report.q_left_direct, report.q_left_cross,
            report.q_right, report.q_right_direct, report.q_right_cross,
            flags["left_direct"], flags["left_cross"],
            flags["right_direct"], flags["right_cross"],
        ),),
    )


def _run_coa(config: RunConfig) -> Table:
    scenario = config.scenario
    if scenario.regime is Regime.RESONANT_DEGENERATE:
        rho22 = _need_rho22(config)
        closed = coa_resonant_closed(rho22, scenario)
        from .steadystate import steady_state_family
        from .dissipators import rate_matrix

        state = steady_state_family(rate_matrix(scenario), rho22).populations
        generic = coa_general(to_bare_basis(state, scenario.eig))
        h = resonant_intercept(scenario)
        rows = ((rho22, h, closed, generic, abs(closed - generic)),)
        columns = ("rho22", "h", "coa_closed", "coa_generic", "deviation")
    else:
        state = steady_populations(scenario)
        closed = coa_detuned_closed(state, scenario.eig)
        generic = coa_general(to_bare_basis(state, scenario.eig))
        rows = ((closed, generic, abs(closed - generic)),)
        columns = ("coa_closed", "coa_generic", "deviation")
    deviation = rows[0][-1]
    if deviation > 1e-9:
        raise InvariantViolationError(
            f"closed-form entanglement deviates from the generic route by {deviation:.3e}"
        )
    return Table(columns=columns, rows=rows)


def _run_sweep(config: RunConfig, threads: int) -> Table:
    axes = _parse_axes(config.command)
    include_delta = bool(config.command.get("include_delta", False))
    result = sweep(config.scenario, axes, include_delta=include_delta, threads=threads)
    return Table(columns=result.columns, rows=result.rows)


def _run_modulate(config: RunConfig) -> Table:
    cmd = config.command
    targets = cmd.get("targets")
    if not isinstance(targets, list) or not targets:
        raise ConfigError(["command.targets: expected a nonempty list of rho22 targets"])
    omega_r = float(cmd.get("omega_r", 0.5 * math.pi))
    window = float(cmd.get("window", 50.0))
    sample_dt = float(cmd.get("sample_dt", 0.5))
    initial_rho22 = float(cmd.get("initial_rho22", 1.0))
    scenario = config.scenario
    try:
        schedule = build_staircase_schedule(
            scenario, [float(t) for t in targets], omega_r=omega_r, window=window,
            initial_rho22=initial_rho22,
        )
        if initial_rho22 >= 1.0:
            initial = DARK_STATE.copy()
        else:
            from .dissipators import rate_matrix
            from .steadystate import steady_state_family

            initial = steady_state_family(rate_matrix(scenario), initial_rho22).populations
        series = run_schedule(scenario, schedule, initial, sample_dt=sample_dt)
    except (RegimeMismatchError, ValueError) as exc:
        raise ConfigError([f"command: {exc}"])
    rows = tuple(
        (float(t), *map(float, p), float(ql), float(qr), phase)
        for t, p, ql, qr, phase in zip(
            series.times, series.populations, series.q_left, series.q_right, series.phase
        )
    )
    return Table(
        columns=("t", "p11", "p22", "p33", "p44", "q_left", "q_right", "phase"),
        rows=rows,
    )


def _default_out(subcommand: str, fmt: str) -> str:
    return f"{subcommand}.{fmt}"


def run(subcommand: str, config: RunConfig | None, *, out: str | None = None,
        fmt: str | None = None, precision: int | None = None, threads: int = 1,
        plot: bool = True, preset_name: str | None = None,
        validate_per_regime: int = 100, validate_seed: int = 20220831) -> tuple[int, list[Path]]:
    """Execute one subcommand; returns (exit status, written files)."""
    files: list[Path] = []
    if subcommand == "validate":
        result = run_validation(n_per_regime=validate_per_regime, seed=validate_seed)
        for line in result.lines():
            print(line)
        return (EXIT_OK if result.ok else EXIT_NUMERIC), files

    if subcommand == "preset":
        output = build_preset(preset_name)
        fmt = fmt or "csv"
        precision = precision or DEFAULT_PRECISION
        out_path = Path(out) if out else Path(_default_out(preset_name, fmt))
        files.append(write_table(output.table, out_path, fmt, precision))
        for key, sidecar in sorted(output.sidecars.items()):
            side_path = out_path.with_name(f"{out_path.stem}_{key}{out_path.suffix}")
            files.append(write_table(sidecar, side_path, fmt, precision))
        if plot:
            from .plots import render_preset_plot

            files.append(
                render_preset_plot(output.plot_kind, output.table, output.sidecars,
                                   out_path.with_suffix(""))
            )
        print(f"{preset_name}: {output.description}")
        for f in files:
            print(f"wrote {f}")
        return EXIT_OK, files

    assert config is not None
    fmt = fmt or config.output.get("format", "csv")
    precision = precision or config.output.get("precision", DEFAULT_PRECISION)
    out_path = Path(out or config.output.get("path", _default_out(subcommand, fmt)))

    runners = {
        "steady": lambda: _run_steady(config),
        "currents": lambda: _run_currents(config),
        "channels": lambda: _run_channels(config),
        "coa": lambda: _run_coa(config),
        "sweep": lambda: _run_sweep(config, threads),
        "modulate": lambda: _run_modulate(config),
    }
    table = runners[subcommand]()
    files.append(write_table(table, out_path, fmt, precision))
    print(f"wrote {files[-1]}")
    return EXIT_OK, files


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qubitheat", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    common = {
        "--out": dict(help="output file path"),
        "--format": dict(choices=("csv", "json"), help="output format"),
        "--precision": dict(type=int, help="significant digits for floats (1..17)"),
        "--threads": dict(type=int, default=1, help="parallel sweep workers"),
    }
    for name in ("steady", "currents", "channels", "sweep", "modulate", "coa"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        for flag, kwargs in common.items():
            p.add_argument(flag, **kwargs)
    p = sub.add_parser("preset")
    p.add_argument("name", choices=sorted(PRESETS))
    for flag, kwargs in common.items():
        p.add_argument(flag, **kwargs)
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p = sub.add_parser("validate")
    p.add_argument("--per-regime", type=int, default=100)
    p.add_argument("--seed", type=int, default=20220831)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if getattr(args, "precision", None) is not None and not 1 <= args.precision <= 17:
        print("error: --precision must be in [1, 17]", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE

    config = None
    try:
        if getattr(args, "config", None) is not None:
            config_path = Path(args.config)
            if not config_path.exists():
                print(f"config error: {config_path} does not exist", file=sys.stderr)
                return EXIT_CONFIG
            config = parse_config(config_path.read_text(encoding="utf-8"))
        code, _ = run(
            args.subcommand,
            config,
            out=getattr(args, "out", None),
            fmt=getattr(args, "format", None),
            precision=getattr(args, "precision", None),
            threads=getattr(args, "threads", 1),
            plot=not getattr(args, "no_plot", False),
            preset_name=getattr(args, "name", None),
            validate_per_regime=getattr(args, "per_regime", 100),
            validate_seed=getattr(args, "seed", 20220831),
        )
        return code
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvariantViolationError, RegimeMismatchError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RuntimeError, ValueError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
