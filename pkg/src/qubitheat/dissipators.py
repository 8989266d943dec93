"""Reservoir spectra and dissipation generators for every coupling scenario.

Two independent constructions are provided:

* closed-form 4x4 population rate matrices (per reservoir, with the
  direct/cross channel split for common reservoirs), assembled from the
  per-edge bilinear rates implied by the eigenoperator amplitudes;
* the full 16x16 superoperator assembled term by term from the secular
  dissipator, used as an oracle for the closed forms.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

import numpy as np

from .model import (
    RESONANCE_RTOL,
    EigenSystem,
    SystemParams,
    diagonalize,
    eigenoperators,
)


class Topology(str, Enum):
    COMMON = "common"
    INDEPENDENT = "independent"


class Regime(str, Enum):
    DETUNED_COUPLED = "detuned_coupled"
    RESONANT_COUPLED = "resonant_coupled"
    RESONANT_DEGENERATE = "resonant_degenerate"
    UNCOUPLED_DETUNED = "uncoupled_detuned"
    UNCOUPLED_RESONANT = "uncoupled_resonant"
    UNCOUPLED_INDEPENDENT = "uncoupled_independent"


class RegimeMismatchError(ValueError):
    """Operation invoked on a scenario outside its declared regime."""


def bose_occupation(omega: float, temperature: float) -> float:
    """Mean photon number 1 / (exp(omega/T) - 1); zero at T = 0."""
    if omega <= 0:
        raise ValueError(f"mode frequency must be positive, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be nonnegative, got {temperature}")
    if temperature == 0:
        return 0.0
    x = omega / temperature
    try:
        return 1.0 / math.expm1(x)
    except OverflowError:
        return 0.0


@dataclass(frozen=True)
class RateTable:
    """Dissipation rates gamma^{mn}(omega_i), indexed by the two transition energies.

    Each field is an (at omega_-, at omega_+) pair.  When gamma12 is omitted
    it defaults to the product form sqrt(gamma11 * gamma22), which is the
    rank-one coupling the closed forms assume; an explicit non-product value
    is accepted within the physicality bound but flagged with a warning.
    """

    gamma11: tuple[float, float]
    gamma22: tuple[float, float]
    gamma12: tuple[float, float] | None = None

    def __post_init__(self):
        for name in ("gamma11", "gamma22"):
            pair = getattr(self, name)
            if len(pair) != 2 or any(v < 0 for v in pair):
                raise ValueError(f"{name} must be a pair of nonnegative rates, got {pair}")
        if self.gamma12 is None:
            object.__setattr__(
                self,
                "gamma12",
                tuple(math.sqrt(a * b) for a, b in zip(self.gamma11, self.gamma22)),
            )
        else:
            for g12, g11, g22 in zip(self.gamma12, self.gamma11, self.gamma22):
                if g12 * g12 > g11 * g22 * (1 + 1e-12) + 1e-300:
                    raise ValueError(
                        f"gamma12={g12} violates physicality gamma12^2 <= gamma11*gamma22"
                    )
            if not self.is_rank_one:
                warnings.warn(
                    "gamma12 departs from the product form sqrt(gamma11*gamma22); "
                    "closed-form rate expressions assume the product form",
                    stacklevel=2,
                )

    @classmethod
    def flat(cls, gamma: float) -> "RateTable":
        """Single rate for every qubit pair and both transition energies."""
        return cls(gamma11=(gamma, gamma), gamma22=(gamma, gamma))

    @classmethod
    def per_frequency(cls, gamma_minus: float, gamma_plus: float) -> "RateTable":
        """gamma^{mn}(omega_i) = gamma_i for all m, n."""
        pair = (gamma_minus, gamma_plus)
        return cls(gamma11=pair, gamma22=pair)

    def gamma(self, m: int, n: int, slot: int) -> float:
        """Rate for qubit pair (m, n) at frequency slot 0 (omega_-) or 1 (omega_+)."""
        if (m, n) in ((1, 1),):
            return self.gamma11[slot]
        if (m, n) in ((2, 2),):
            return self.gamma22[slot]
        if (m, n) in ((1, 2), (2, 1)):
            return self.gamma12[slot]
        raise ValueError(f"qubit indices must be in {{1, 2}}, got ({m}, {n})")

    @property
    def is_rank_one(self) -> bool:
        return all(
            abs(g12 - math.sqrt(g11 * g22)) <= 1e-12 * max(g11, g22, 1e-300)
            for g12, g11, g22 in zip(self.gamma12, self.gamma11, self.gamma22)
        )

    @property
    def is_uniform(self) -> bool:
        """True when gamma^{mn}(omega_i) = gamma_i exactly for all m, n."""
        return all(
            self.gamma11[s] == self.gamma22[s] == self.gamma12[s] for s in (0, 1)
        )

    def entries(self) -> tuple[float, ...]:
        return (*self.gamma11, *self.gamma22, *self.gamma12)

    def proportional_to(self, other: "RateTable", rtol: float = 1e-12) -> bool:
        """True when the tables differ by one overall factor (same coupling geometry)."""
        a, b = np.array(self.entries()), np.array(other.entries())
        scale_a, scale_b = a.max(), b.max()
        if scale_a == 0.0 or scale_b == 0.0:
            return True
        return bool(np.abs(a / scale_a - b / scale_b).max() <= rtol)


@dataclass(frozen=True)
class ReservoirSpec:
    """One thermal reservoir: label L or R, temperature, and its rate table."""

    label: str
    temperature: float
    rates: RateTable

    def __post_init__(self):
        if self.label not in ("L", "R"):
            raise ValueError(f"reservoir label must be 'L' or 'R', got {self.label!r}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be nonnegative, got {self.temperature}")

    def occupation(self, omega: float) -> float:
        return bose_occupation(omega, self.temperature)


def spectral_density(
    res: ReservoirSpec, m: int, n: int, omega_i: float, sign: int, slot: int
) -> float:
    """J^{mn}(sign * omega_i): gamma * nbar for absorption (+), gamma * (nbar + 1) for emission (-).

    ``slot`` selects the rate-table column (0 for omega_-, 1 for omega_+);
    ``omega_i`` is the positive transition energy entering the Bose factor.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    gam = res.rates.gamma(m, n, slot)
    nbar = res.occupation(omega_i)
    return gam * nbar if sign > 0 else gam * (nbar + 1.0)


@dataclass(frozen=True)
class Scenario:
    """System parameters plus reservoir topology; the regime is derived."""

    params: SystemParams
    topology: Topology
    left: ReservoirSpec
    right: ReservoirSpec

    def __post_init__(self):
        if self.left.label != "L" or self.right.label != "R":
            raise ValueError("left reservoir must be labeled 'L' and right 'R'")
        if self.params.is_resonant() and self.params.g == 0:
            # Both transition energies collapse to omega; a frequency-split
            # rate table would be ambiguous.
            for res in (self.left, self.right):
                t = res.rates
                if t.gamma11[0] != t.gamma11[1] or t.gamma22[0] != t.gamma22[1]:
                    raise ValueError(
                        "omega1 = omega2 with g = 0 merges the transition energies; "
                        "the rate table must not depend on the frequency slot"
                    )
            if not self.left.rates.proportional_to(self.right.rates):
                # With a fully degenerate spectrum the stationary state keeps a
                # coherence between the degenerate pair unless both reservoirs
                # share one coupling geometry, and the population-only closed
                # forms stop being exact.
                raise ValueError(
                    "omega1 = omega2 with g = 0 requires the two reservoirs' rate "
                    "tables to be proportional (one shared qubit-coupling ratio); "
                    "otherwise the steady state is not diagonal in the collective basis"
                )

    @cached_property
    def eig(self) -> EigenSystem:
        return diagonalize(self.params)

    @cached_property
    def regime(self) -> Regime:
        if self.topology is Topology.INDEPENDENT:
            return Regime.UNCOUPLED_INDEPENDENT
        resonant = self.params.is_resonant()
        coupled = self.params.g > 0
        uniform = self.left.rates.is_uniform and self.right.rates.is_uniform
        if resonant and uniform:
            return Regime.RESONANT_DEGENERATE
        if resonant and coupled:
            return Regime.RESONANT_COUPLED
        if resonant:
            return Regime.UNCOUPLED_RESONANT
        if coupled:
            return Regime.DETUNED_COUPLED
        return Regime.UNCOUPLED_DETUNED

    @property
    def reservoirs(self) -> tuple[ReservoirSpec, ReservoirSpec]:
        return (self.left, self.right)

    def twin(self, topology: Topology) -> "Scenario":
        """Same parameters, temperatures, and rates under the other topology."""
        return replace(self, topology=topology)


# Transition edges of the four-level ladder: (lower, upper, frequency slot).
# Slot 0 carries omega_-, slot 1 carries omega_+.  There are no 1-4 or 2-3
# transitions; their gaps match neither omega_- nor omega_+.
_EDGES = ((0, 1, 0), (2, 3, 0), (0, 2, 1), (1, 3, 1))


def _edge_amplitudes(eig: EigenSystem):
    """Per-edge lowering amplitudes (A1, A2) of qubits 1 and 2.

    At resonance (theta_d = pi/4 exactly) the identities cos(theta_-) =
    sin(theta_+) and sin(theta_-) = cos(theta_+) are enforced by reusing the
    same floats, which makes the dark-transition rates cancel exactly.
    """
    sp, cp = math.sin(eig.theta_plus), math.cos(eig.theta_plus)
    if eig.theta_d == 0.25 * math.pi:
        sm, cm = cp, sp
    else:
        sm, cm = math.sin(eig.theta_minus), math.cos(eig.theta_minus)
    return {
        (0, 1): (-sp, cm),
        (2, 3): (sp, cm),
        (0, 2): (cp, sm),
        (1, 3): (cp, -sm),
    }


def _reservoir_generator(
    scenario: Scenario, res: ReservoirSpec, include_cross: bool
) -> np.ndarray:
    """4x4 population generator d|rho>/dt = M |rho> contributed by one reservoir.

    Per edge, the upward rate is 2 * n * q and the downward rate
    2 * (n + 1) * q with the bilinear coupling
    q = A1^2 gamma11 + A2^2 gamma22 + 2 A1 A2 gamma12 (cross term dropped for
    independent reservoirs or for the direct-channel part).
    """
    eig = scenario.eig
    amps = _edge_amplitudes(eig)
    freqs = (eig.omega_minus, eig.omega_plus)
    gen = np.zeros((4, 4))
    for p, q_lvl, slot in _EDGES:
        a1, a2 = amps[(p, q_lvl)]
        quad = (
            a1 * a1 * res.rates.gamma(1, 1, slot)
            + a2 * a2 * res.rates.gamma(2, 2, slot)
        )
        if include_cross:
            quad += 2.0 * a1 * a2 * res.rates.gamma(1, 2, slot)
        # The form is positive semidefinite by the physicality bound; any
        # negative value is pure roundoff of an exact cancellation.
        quad = max(quad, 0.0)
        omega = freqs[slot]
        nbar = res.occupation(omega)
        up = 2.0 * nbar * quad
        down = 2.0 * (nbar + 1.0) * quad
        gen[q_lvl, p] += up
        gen[p, p] -= up
        gen[p, q_lvl] += down
        gen[q_lvl, q_lvl] -= down
    return gen


@dataclass(frozen=True)
class RateMatrix:
    """Per-reservoir population rate matrices with the direct/cross split.

    Columns of every matrix sum to zero (probability conservation); for
    independent reservoirs the direct part equals the full matrix.
    """

    scenario: Scenario
    left: np.ndarray
    right: np.ndarray
    left_direct: np.ndarray
    right_direct: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.left + self.right

    @property
    def direct(self) -> np.ndarray:
        return self.left_direct + self.right_direct

    @property
    def cross(self) -> np.ndarray:
        return self.total - self.direct

    @property
    def left_cross(self) -> np.ndarray:
        return self.left - self.left_direct

    @property
    def right_cross(self) -> np.ndarray:
        return self.right - self.right_direct

    def per_reservoir(self, label: str) -> np.ndarray:
        if label == "L":
            return self.left
        if label == "R":
            return self.right
        raise ValueError(f"reservoir label must be 'L' or 'R', got {label!r}")


def rate_matrix(scenario: Scenario) -> RateMatrix:
    """Population rate matrices for any scenario."""
    cross = scenario.topology is Topology.COMMON
    left = _reservoir_generator(scenario, scenario.left, cross)
    right = _reservoir_generator(scenario, scenario.right, cross)
    left_d = _reservoir_generator(scenario, scenario.left, False) if cross else left
    right_d = _reservoir_generator(scenario, scenario.right, False) if cross else right
    for arr in (left, right, left_d, right_d):
        arr.setflags(write=False)
    return RateMatrix(scenario, left, right, left_d, right_d)


def rate_matrix_common_detuned(scenario: Scenario) -> RateMatrix:
    """Common-reservoir rate matrices for detuned coupled qubits."""
    if scenario.regime is not Regime.DETUNED_COUPLED:
        raise RegimeMismatchError(
            f"expected a detuned coupled common-reservoir scenario, got {scenario.regime.value}"
        )
    return rate_matrix(scenario)


def rate_matrix_independent(scenario: Scenario) -> RateMatrix:
    """Rate matrices without bath-mediated cross terms.

    Valid for independent reservoirs at any coupling, and for common
    reservoirs with g = 0 and detuned qubits, where the secular
    approximation removes the cross dissipation.
    """
    if scenario.regime not in (Regime.UNCOUPLED_INDEPENDENT, Regime.UNCOUPLED_DETUNED):
        raise RegimeMismatchError(
            f"expected independent reservoirs or uncoupled detuned qubits, got {scenario.regime.value}"
        )
    return rate_matrix(scenario)


def rate_matrix_resonant(scenario: Scenario) -> RateMatrix:
    """Common-reservoir rate matrices for resonant qubits (omega1 = omega2).

    Covers the generic unequal-rate case, the degenerate equal-rate case
    (identically zero second row and column, rank 2), and the uncoupled
    resonant case, where the collective singlet/triplet amplitudes arise
    from the theta_d = pi/4 convention.
    """
    if scenario.regime not in (
        Regime.RESONANT_COUPLED,
        Regime.RESONANT_DEGENERATE,
        Regime.UNCOUPLED_RESONANT,
    ):
        raise RegimeMismatchError(
            f"expected resonant qubits on common reservoirs, got {scenario.regime.value}"
        )
    return rate_matrix(scenario)


@dataclass(frozen=True)
class Liouvillian:
    """Full secular superoperator acting on column-vectorized density matrices."""

    scenario: Scenario
    matrix: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def per_reservoir(self, label: str) -> np.ndarray:
        if label == "L":
            return self.left
        if label == "R":
            return self.right
        raise ValueError(f"reservoir label must be 'L' or 'R', got {label!r}")


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(rho).flatten(order="F")


def unvectorize(vec: np.ndarray) -> np.ndarray:
    return np.asarray(vec).reshape((4, 4), order="F")


def _frequency_classes(ops, scale: float):
    """Group eigenoperators whose transition energies coincide.

    At g = 0 on resonance all four transitions share one energy and the
    secular dissipator couples the merged operators; elsewhere the two
    classes are {omega_-} and {omega_+}.
    """
    classes: list[list] = []
    for op in ops:
        for cls in classes:
            if abs(cls[0].frequency - op.frequency) < RESONANCE_RTOL * scale:
                cls.append(op)
                break
        else:
            classes.append([op])
    return classes


def _dissipator_block(v_n: np.ndarray, v_m: np.ndarray, j_emit: float, j_abs: float) -> np.ndarray:
    """Superoperator for one (m, n) pair of one frequency class.

    Emission: j_emit * (2 Vn rho Vm+ - Vm+ Vn rho - rho Vm+ Vn);
    absorption with the daggers swapped.  All eigenoperators are real.
    """
    eye = np.eye(4)
    vmt_vn = v_m.T @ v_n
    vm_vnt = v_m @ v_n.T
    block = j_emit * (
        2.0 * np.kron(v_m, v_n) - np.kron(eye, vmt_vn) - np.kron(vmt_vn.T, eye)
    )
    block += j_abs * (
        2.0 * np.kron(v_m.T, v_n.T) - np.kron(eye, vm_vnt) - np.kron(vm_vnt.T, eye)
    )
    return block


def build_liouvillian(scenario: Scenario) -> Liouvillian:
    """Assemble the 16x16 superoperator term by term from the dissipator definition.

    This path never touches the closed-form rate matrices; its population
    block is compared against them in tests.
    """
    eig = scenario.eig
    ops = eigenoperators(scenario.params, eig)
    classes = _frequency_classes(ops, max(eig.omega_plus, 1.0))
    include_cross = scenario.topology is Topology.COMMON

    parts = {}
    for res in scenario.reservoirs:
        total = np.zeros((16, 16))
        for cls in classes:
            omega = cls[0].frequency
            # Rate-table column for this class; when the two transition
            # energies merge, scenario validation guarantees both columns
            # agree, so the choice is immaterial.
            slot = 0 if abs(omega - eig.omega_minus) <= abs(omega - eig.omega_plus) else 1
            # Merge same-qubit operators that fall in one frequency class.
            merged: dict[int, np.ndarray] = {}
            for op in cls:
                merged[op.qubit] = merged.get(op.qubit, np.zeros((4, 4))) + op.matrix
            for m, v_m in merged.items():
                for n, v_n in merged.items():
                    if m != n and not include_cross:
                        continue
                    j_emit = spectral_density(res, m, n, omega, -1, slot)
                    j_abs = spectral_density(res, m, n, omega, +1, slot)
                    total += _dissipator_block(v_n, v_m, j_emit, j_abs)
        total = total.astype(complex)
        total.setflags(write=False)
        parts[res.label] = total
    matrix = parts["L"] + parts["R"]
    matrix.setflags(write=False)
    return Liouvillian(scenario, matrix, parts["L"], parts["R"])


_DIAG_IDX = np.array([0, 5, 10, 15])


def population_block(liouvillian_matrix: np.ndarray) -> np.ndarray:
    """4x4 sub-block of a superoperator mapping populations to populations."""
    return np.real(liouvillian_matrix[np.ix_(_DIAG_IDX, _DIAG_IDX)])
