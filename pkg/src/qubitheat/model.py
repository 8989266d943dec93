"""Two-qubit Hamiltonian, its eigensystem, and the transition eigenoperators.

Units: hbar = k_B = 1 throughout, so frequencies, energies, and temperatures
share one energy unit.  The bare (product) basis is ordered
{up-up, up-down, down-up, down-down}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative detuning below which the two qubits are treated as exactly
# resonant.  Near-degenerate detunings make the difference-block mixing
# angle ill conditioned, so the switch is deliberately sharp.
RESONANCE_RTOL = 1e-9

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


@dataclass(frozen=True)
class SystemParams:
    """Bare qubit frequencies and the transverse (x-x) coupling strength."""

    omega1: float
    omega2: float
    g: float

    def __post_init__(self):
        if not self.omega1 > 0:
            raise ValueError(f"omega1 must be positive, got {self.omega1}")
        if not self.omega2 > 0:
            raise ValueError(f"omega2 must be positive, got {self.omega2}")
        if self.g < 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")

    @property
    def omega_s(self) -> float:
        """Half sum of the bare frequencies."""
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def omega_d(self) -> float:
        """Half difference of the bare frequencies (signed; negative when omega2 > omega1)."""
        return 0.5 * (self.omega1 - self.omega2)

    def is_resonant(self) -> bool:
        return abs(self.omega1 - self.omega2) < RESONANCE_RTOL * max(self.omega1, self.omega2)


@dataclass(frozen=True)
class EigenSystem:
    """Diagonalized four-level structure of the coupled pair.

    ``basis`` holds the eigenstates as columns in bare coordinates, with the
    explicit sign convention sin(theta_nu) >= 0, cos(theta_nu) >= 0, so that
    eigenoperator matrix elements are reproducible bit for bit.  Level
    ordering is by ascending energy: lambdas = [-G_s, -G_d, +G_d, +G_s].
    """

    gamma_s: float
    gamma_d: float
    theta_s: float
    theta_d: float
    theta_plus: float
    theta_minus: float
    omega_plus: float
    omega_minus: float
    lambdas: np.ndarray
    basis: np.ndarray

    def frequencies_merge(self) -> bool:
        """True when the two transition energies coincide (g = 0 at resonance)."""
        return abs(self.omega_plus - self.omega_minus) < RESONANCE_RTOL * max(self.omega_plus, 1.0)


@dataclass(frozen=True)
class EigenOperator:
    """Lowering operator of one qubit at one transition energy, in the eigenbasis.

    Satisfies [H_S, V] = -frequency * V: entry (p, q) is nonzero only where
    lambda_q - lambda_p equals ``frequency``.
    """

    qubit: int
    frequency: float
    matrix: np.ndarray


def hamiltonian_bare(params: SystemParams) -> np.ndarray:
    """4x4 system Hamiltonian in the bare product basis."""
    h = 0.5 * params.omega1 * np.kron(_SIGMA_Z, np.eye(2))
    h += 0.5 * params.omega2 * np.kron(np.eye(2), _SIGMA_Z)
    h += params.g * np.kron(_SIGMA_X, _SIGMA_X)
    return h


def _mixing_angle(omega_nu: float, g: float, gamma_nu: float) -> float:
    """Angle theta_nu with sin(theta_nu) = g / sqrt((Gamma_nu + omega_nu)^2 + g^2).

    For omega_nu < 0 the direct sum Gamma_nu + omega_nu cancels
    catastrophically at small g; the identity g^2 / (Gamma_nu - omega_nu)
    is used instead.
    """
    if g == 0.0:
        if omega_nu > 0:
            return 0.0
        if omega_nu < 0:
            return 0.5 * math.pi
        return 0.25 * math.pi
    if omega_nu < 0:
        den = g * g / (gamma_nu - omega_nu)
    else:
        den = gamma_nu + omega_nu
    return math.atan2(g, den)


def diagonalize(params: SystemParams) -> EigenSystem:
    """Eigendecomposition of the coupled pair with the fixed sign convention.

    At exact resonance (within RESONANCE_RTOL) the difference block is
    degenerate and the singlet/triplet convention theta_d = pi/4 is used,
    which is the g -> 0 limit along the resonant family.
    """
    g = params.g
    omega_s = params.omega_s
    omega_d = 0.0 if params.is_resonant() else params.omega_d

    gamma_s = math.hypot(omega_s, g)
    gamma_d = math.hypot(omega_d, g)
    theta_s = _mixing_angle(omega_s, g, gamma_s)
    # Exact pi/4 at resonance, so that the singlet/triplet trig identities
    # (and with them the dark-state cancellations) hold bit for bit.
    theta_d = 0.25 * math.pi if params.is_resonant() else _mixing_angle(omega_d, g, gamma_d)

    sin_s, cos_s = math.sin(theta_s), math.cos(theta_s)
    sin_d, cos_d = math.sin(theta_d), math.cos(theta_d)
    basis = np.array(
        [
            [-sin_s, 0.0, 0.0, cos_s],
            [0.0, -sin_d, cos_d, 0.0],
            [0.0, cos_d, sin_d, 0.0],
            [cos_s, 0.0, 0.0, sin_s],
        ]
    )
    lambdas = np.array([-gamma_s, -gamma_d, gamma_d, gamma_s])
    for arr in (basis, lambdas):
        arr.setflags(write=False)
    return EigenSystem(
        gamma_s=gamma_s,
        gamma_d=gamma_d,
        theta_s=theta_s,
        theta_d=theta_d,
        theta_plus=theta_d + theta_s,
        theta_minus=theta_d - theta_s,
        omega_plus=gamma_s + gamma_d,
        omega_minus=gamma_s - gamma_d,
        lambdas=lambdas,
        basis=basis,
    )


def _ketbra(p: int, q: int) -> np.ndarray:
    m = np.zeros((4, 4))
    m[p, q] = 1.0
    return m


def eigenoperators(params: SystemParams, eig: EigenSystem) -> list[EigenOperator]:
    """The four lowering eigenoperators V_m(omega_-+), m = 1, 2.

    In the uncoupled detuned limit these reduce to the per-qubit lowering
    operators; at g = 0 on resonance the amplitudes become the symmetric and
    antisymmetric combinations of the singlet/triplet basis.
    """
    sp = math.sin(eig.theta_plus)
    cp = math.cos(eig.theta_plus)
    if eig.theta_d == 0.25 * math.pi:
        # Resonance: reuse the same floats for cos(theta_-) = sin(theta_+)
        # and sin(theta_-) = cos(theta_+) so collective cancellations are exact.
        sm, cm = cp, sp
    else:
        sm = math.sin(eig.theta_minus)
        cm = math.cos(eig.theta_minus)
    ops = [
        EigenOperator(1, eig.omega_minus, sp * (_ketbra(2, 3) - _ketbra(0, 1))),
        EigenOperator(1, eig.omega_plus, cp * (_ketbra(0, 2) + _ketbra(1, 3))),
        EigenOperator(2, eig.omega_minus, cm * (_ketbra(0, 1) + _ketbra(2, 3))),
        EigenOperator(2, eig.omega_plus, sm * (_ketbra(0, 2) - _ketbra(1, 3))),
    ]
    for op in ops:
        op.matrix.setflags(write=False)
    return ops


def to_bare_basis(rho_eigen: np.ndarray, eig: EigenSystem) -> np.ndarray:
    """Similarity transform of a density matrix from the eigenbasis to the bare basis."""
    rho = np.asarray(rho_eigen)
    if rho.shape == (4,):
        rho = np.diag(rho)
    return eig.basis @ rho @ eig.basis.T


def to_eigen_basis(rho_bare: np.ndarray, eig: EigenSystem) -> np.ndarray:
    """Inverse transform of :func:`to_bare_basis`."""
    return eig.basis.T @ np.asarray(rho_bare) @ eig.basis
