"""Concurrence of assistance: generic spin-flip evaluation and the closed forms.

For a two-qubit density matrix rho, the measure is the eigenvalue sum of
R = sqrt(sqrt(rho) rho_tilde sqrt(rho)) with the spin-flipped
rho_tilde = (sy x sy) conj(rho) (sy x sy).  The steady states here are
X-shaped in the bare basis, where the sum collapses to
2 sqrt(D J) + 2 sqrt(E F) over the X elements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dissipators import Regime, RegimeMismatchError, Scenario, spectral_density
from .model import EigenSystem

_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_FLIP = np.kron(_SY, _SY).real  # real matrix: diag(-1, 1, 1, -1) on the antidiagonal


@dataclass(frozen=True)
class XStateElements:
    """Elements of an X-shaped two-qubit state in the bare basis.

    d, e, f, j are the diagonal entries in bare order
    (up-up, up-down, down-up, down-down); k is the outer (up-up, down-down)
    coherence and l the inner (up-down, down-up) one.
    """

    d: float
    e: float
    f: float
    j: float
    k: float
    l: float

    def __post_init__(self):
        if abs(self.d + self.e + self.f + self.j - 1.0) > 1e-12:
            raise ValueError("X-state diagonal must sum to one")
        if abs(self.k) > math.sqrt(max(self.d * self.j, 0.0)) + 1e-12:
            raise ValueError("outer coherence violates positivity: |k| > sqrt(d j)")
        if abs(self.l) > math.sqrt(max(self.e * self.f, 0.0)) + 1e-12:
            raise ValueError("inner coherence violates positivity: |l| > sqrt(e f)")

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.d, 0.0, 0.0, self.k],
                [0.0, self.e, self.l, 0.0],
                [0.0, self.l, self.f, 0.0],
                [self.k, 0.0, 0.0, self.j],
            ]
        )


def x_elements_detuned(state: np.ndarray, eig: EigenSystem) -> XStateElements:
    """Bare-basis X elements of a diagonal eigenbasis steady state."""
    r1, r2, r3, r4 = np.asarray(state, dtype=float)
    ss, cs = math.sin(eig.theta_s), math.cos(eig.theta_s)
    sd, cd = math.sin(eig.theta_d), math.cos(eig.theta_d)
    return XStateElements(
        d=ss * ss * r1 + cs * cs * r4,
        e=sd * sd * r2 + cd * cd * r3,
        f=cd * cd * r2 + sd * sd * r3,
        j=cs * cs * r1 + ss * ss * r4,
        k=ss * cs * (r4 - r1),
        l=sd * cd * (r3 - r2),
    )


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _check_state(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > 1e-10:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density matrix must be positive semidefinite")
    return rho


def spin_flipped(rho: np.ndarray) -> np.ndarray:
    return _FLIP @ np.conj(rho) @ _FLIP


def coa_general(rho_bare: np.ndarray) -> float:
    """Eigenvalue sum of R = sqrt(sqrt(rho) rho_tilde sqrt(rho)), evaluated literally.

    Hermitian eigendecompositions keep the tiny eigenvalues accurate enough
    for the 1e-9 closed-form comparisons.
    """
    rho = _check_state(rho_bare)
    root = _psd_sqrt(rho)
    inner = root @ spin_flipped(rho) @ root
    inner = 0.5 * (inner + inner.conj().T)
    vals = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sqrt(vals).sum())


def coa_general_product(rho_bare: np.ndarray) -> float:
    """Same quantity via the spectrum of rho rho_tilde.

    Slightly less accurate near pure states (general eigensolver); agreement
    with :func:`coa_general` is a test, not an assumption.
    """
    rho = _check_state(rho_bare)
    vals = np.linalg.eigvals(rho @ spin_flipped(rho))
    vals = np.clip(vals.real, 0.0, None)
    return float(np.sqrt(vals).sum())


def coa_detuned_closed(state: np.ndarray, eig: EigenSystem) -> float:
    """Closed form for diagonal eigenbasis steady states of detuned pairs.

    2 sqrt(h_s (r1 - r4)^2 + r1 r4) + 2 sqrt(h_d (r2 - r3)^2 + r2 r3) with
    h_nu = sin^2(theta_nu) cos^2(theta_nu); at g = 0 both h vanish.
    """
    r1, r2, r3, r4 = np.asarray(state, dtype=float)
    h_s = (math.sin(eig.theta_s) * math.cos(eig.theta_s)) ** 2
    h_d = (math.sin(eig.theta_d) * math.cos(eig.theta_d)) ** 2
    return 2.0 * (
        math.sqrt(h_s * (r1 - r4) ** 2 + r1 * r4)
        + math.sqrt(h_d * (r2 - r3) ** 2 + r2 * r3)
    )


def _degenerate_collective_rates(scenario: Scenario) -> tuple[float, float, float, float]:
    eig = scenario.eig
    c2 = math.cos(eig.theta_plus) ** 2
    s2 = math.sin(eig.theta_plus) ** 2
    w = [0.0, 0.0, 0.0, 0.0]
    for res in scenario.reservoirs:
        w[0] += -8.0 * c2 * spectral_density(res, 1, 1, eig.omega_plus, +1, 1)
        w[1] += -8.0 * c2 * spectral_density(res, 1, 1, eig.omega_plus, -1, 1)
        w[2] += -8.0 * s2 * spectral_density(res, 1, 1, eig.omega_minus, +1, 0)
        w[3] += -8.0 * s2 * spectral_density(res, 1, 1, eig.omega_minus, -1, 0)
    return tuple(w)


def resonant_intercept(scenario: Scenario) -> float:
    """Intercept h of the linear law coa = (1 - h) rho22 + h."""
    if scenario.regime is not Regime.RESONANT_DEGENERATE:
        raise RegimeMismatchError(
            f"expected the degenerate resonant regime, got {scenario.regime.value}"
        )
    w1, w2, w3, w4 = _degenerate_collective_rates(scenario)
    norm = w2 * w4 + w1 * w4 + w1 * w3
    theta = scenario.eig.theta_s
    sc2 = (math.sin(theta) * math.cos(theta)) ** 2
    return (
        w1 * w4
        + 2.0 * math.sqrt((w2 * w4 - w1 * w3) ** 2 * sc2 + w1 * w2 * w3 * w4)
    ) / norm


def coa_resonant_closed(rho22: float, scenario: Scenario) -> float:
    """Closed form for the degenerate resonant family, linear in rho22."""
    if not 0.0 <= rho22 <= 1.0:
        raise ValueError(f"rho22 must lie in [0, 1], got {rho22}")
    h = resonant_intercept(scenario)
    return (1.0 - h) * rho22 + h


def x_elements_resonant(scenario: Scenario, rho22: float) -> XStateElements:
    """Bare-basis X elements of a degenerate-family member."""
    if scenario.regime is not Regime.RESONANT_DEGENERATE:
        raise RegimeMismatchError(
            f"expected the degenerate resonant regime, got {scenario.regime.value}"
        )
    w1, w2, w3, w4 = _degenerate_collective_rates(scenario)
    norm = w2 * w4 + w1 * w4 + w1 * w3
    theta = scenario.eig.theta_s
    s2, c2 = math.sin(theta) ** 2, math.cos(theta) ** 2
    sc = math.sin(theta) * math.cos(theta)
    weight = (1.0 - rho22) / norm
    return XStateElements(
        d=weight * (w2 * w4 * s2 + w1 * w3 * c2),
        e=0.5 * weight * w1 * w4 + 0.5 * rho22,
        f=0.5 * weight * w1 * w4 + 0.5 * rho22,
        j=weight * (w2 * w4 * c2 + w1 * w3 * s2),
        k=weight * (w1 * w3 - w2 * w4) * sc,
        l=0.5 * weight * w1 * w4 - 0.5 * rho22,
    )
