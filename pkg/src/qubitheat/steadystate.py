"""Steady-state solvers: closed forms, the dark-state family, and the nullspace oracle.

The closed forms are evaluated from the population rate matrices; the
superoperator nullspace is kept as a fully independent route and the two are
cross-checked in tests and in the validation suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissipators import Liouvillian, RateMatrix, Regime, unvectorize

# Populations this far below zero are treated as roundoff and clamped;
# anything lower is an error.
NEGATIVE_CLAMP = 1e-14

# Singular values below this fraction of the largest one count as zero.
RANK_RTOL = 1e-10


class DegenerateSteadyStateError(RuntimeError):
    """The rate matrix has a rank-2 kernel; use the family solver."""


class NotDegenerateError(RuntimeError):
    """The rate matrix has a unique steady state; the family solver does not apply."""


class NullspaceDimensionError(RuntimeError):
    """Superoperator kernel dimension outside {1, 2}."""


def _as_generator(m) -> np.ndarray:
    if isinstance(m, RateMatrix):
        return m.total
    gen = np.asarray(m, dtype=float)
    if gen.shape != (4, 4):
        raise ValueError(f"expected a 4x4 rate matrix, got shape {gen.shape}")
    return gen


def _numeric_rank(gen: np.ndarray) -> int:
    s = np.linalg.svd(gen, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * s[0]))


def _expected_degenerate(m) -> bool | None:
    if isinstance(m, RateMatrix):
        return m.scenario.regime is Regime.RESONANT_DEGENERATE
    return None


def _normalize_populations(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    total = vec.sum()
    if total == 0:
        raise ValueError("population vector sums to zero")
    vec = vec / total
    low = vec.min()
    if low < -NEGATIVE_CLAMP:
        raise ValueError(f"population {low} below the -{NEGATIVE_CLAMP} clamp threshold")
    vec = np.clip(vec, 0.0, None)
    return vec / vec.sum()


def _check_rank(m, gen: np.ndarray, want_degenerate: bool) -> None:
    """Scenario classification decides the branch; the SVD rank must agree."""
    expected = _expected_degenerate(m)
    rank = _numeric_rank(gen)
    if expected is None:
        expected = rank == 2
    if expected != want_degenerate:
        if want_degenerate:
            raise NotDegenerateError(
                "scenario is not in the degenerate resonant regime (unique steady state)"
            )
        raise DegenerateSteadyStateError(
            "degenerate resonant regime: the steady state is a one-parameter family"
        )
    if expected and rank != 2:
        raise RuntimeError(
            f"regime says degenerate (rank 2) but the SVD rank is {rank}; refusing to guess"
        )
    if not expected and rank != 3:
        raise RuntimeError(
            f"regime says unique steady state (rank 3) but the SVD rank is {rank}; refusing to guess"
        )


def _element(gen: np.ndarray, p: int, q: int) -> float:
    """Closed-form element M^{pq} (1-indexed); the generator entry (q, p) is -M^{pq}."""
    return -gen[q - 1, p - 1]


def _levi_civita_populations(gen: np.ndarray) -> np.ndarray:
    """Literal 4-index permutation-symbol formula for the rank-3 kernel.

    rho_ii = sum_{k,l, j=5-i} |eps_{ijkl}| (M^{ki} + M^{kj}) M^{li} M^{jl},
    which only ever references the eight ladder elements.
    """
    rho = np.zeros(4)
    for i in range(1, 5):
        j = 5 - i
        acc = 0.0
        for k in range(1, 5):
            for l in range(1, 5):
                if len({i, j, k, l}) != 4:
                    continue
                acc += (
                    (_element(gen, k, i) + _element(gen, k, j))
                    * _element(gen, l, i)
                    * _element(gen, j, l)
                )
        rho[i - 1] = acc
    return rho


def _solve_populations(gen: np.ndarray) -> np.ndarray:
    """Elimination route: least-squares kernel vector with unit total population."""
    a = np.vstack([gen, np.ones(4)])
    b = np.zeros(5)
    b[4] = 1.0
    sol, *_ = np.linalg.lstsq(a, b, rcond=None)
    return sol


def steady_state_closed_form(m, method: str = "levi_civita") -> np.ndarray:
    """Unique steady population vector of a rank-3 rate matrix.

    ``method`` selects the literal permutation-symbol formula or the
    elimination route; the two agree to machine precision and are
    cross-checked in tests.
    """
    gen = _as_generator(m)
    _check_rank(m, gen, want_degenerate=False)
    if method == "levi_civita":
        raw = _levi_civita_populations(gen)
    elif method == "solve":
        raw = _solve_populations(gen)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _normalize_populations(raw)


def equal_rate_steady_state(n_minus: float, n_plus: float) -> np.ndarray:
    """Product-form steady state for uniform rates, from the summed occupations.

    n_i = nbar_L(omega_i) + nbar_R(omega_i).  Unnormalized components:
    ([n_- + 2][n_+ + 2], n_-[n_+ + 2], [n_- + 2]n_+, n_- n_+).
    """
    if n_minus < 0 or n_plus < 0:
        raise ValueError("occupation sums must be nonnegative")
    raw = np.array(
        [
            (n_minus + 2.0) * (n_plus + 2.0),
            n_minus * (n_plus + 2.0),
            (n_minus + 2.0) * n_plus,
            n_minus * n_plus,
        ]
    )
    return raw / raw.sum()


DARK_STATE = np.array([0.0, 1.0, 0.0, 0.0])
DARK_STATE.setflags(write=False)


@dataclass(frozen=True)
class SteadyStateFamily:
    """One-parameter steady-state family of the degenerate resonant regime.

    Any convex mixture rho22 * dark + (1 - rho22) * residual is stationary;
    ``rho22`` records the mixture requested by the caller (None when the
    family itself is the result, e.g. from the nullspace oracle).
    """

    dark: np.ndarray
    residual: np.ndarray
    rho22: float | None = None

    def at(self, rho22: float) -> np.ndarray:
        if not 0.0 <= rho22 <= 1.0:
            raise ValueError(f"rho22 must lie in [0, 1], got {rho22}")
        return rho22 * self.dark + (1.0 - rho22) * self.residual

    @property
    def populations(self) -> np.ndarray:
        if self.rho22 is None:
            raise ValueError("family has no selected rho22; call .at(rho22)")
        return self.at(self.rho22)


def steady_state_family(m, rho22: float) -> SteadyStateFamily:
    """Dark/residual decomposition of the rank-2 kernel.

    The residual component is the unique stationary state with no weight on
    the dark level; it follows from the two surviving transition pairs as
    (down13 * down34, 0, up13 * down34, up13 * up34) normalized.
    """
    gen = _as_generator(m)
    _check_rank(m, gen, want_degenerate=True)
    dead = max(np.abs(gen[1, :]).max(), np.abs(gen[:, 1]).max())
    if dead > 1e-12 * max(np.abs(gen).max(), 1e-300):
        raise RuntimeError("dark level is not decoupled; generator row/column 2 not zero")
    up13, down13 = gen[2, 0], gen[0, 2]
    up34, down34 = gen[3, 2], gen[2, 3]
    raw = np.array([down13 * down34, 0.0, up13 * down34, up13 * up34])
    residual = _normalize_populations(raw)
    if not 0.0 <= rho22 <= 1.0:
        raise ValueError(f"rho22 must lie in [0, 1], got {rho22}")
    return SteadyStateFamily(dark=DARK_STATE.copy(), residual=residual, rho22=rho22)


def steady_state_nullspace(liouv: Liouvillian):
    """Nullspace oracle on the 16x16 superoperator.

    Returns the unique steady density matrix (4x4, eigenbasis) for a
    one-dimensional kernel, or a :class:`SteadyStateFamily` for the
    two-dimensional degenerate kernel.  Anything else is an error.
    """
    mat = np.asarray(liouv.matrix)
    _, svals, vh = np.linalg.svd(mat)
    tol = RANK_RTOL * svals[0]
    dim = int(np.sum(svals <= tol))
    if dim == 1:
        rho = unvectorize(vh[-1].conj())
        rho = 0.5 * (rho + rho.conj().T)
        rho = rho / np.trace(rho).real
        eigvals = np.linalg.eigvalsh(rho)
        if eigvals.min() < -1e-10:
            raise RuntimeError(f"nullspace state not positive semidefinite: min eig {eigvals.min()}")
        return rho
    if dim == 2:
        diags = []
        for row in vh[-2:]:
            rho = unvectorize(row.conj())
            rho = 0.5 * (rho + rho.conj().T)
            offdiag = rho - np.diag(np.diag(rho))
            if np.abs(offdiag).max() > 1e-9:
                raise RuntimeError("degenerate kernel contains non-diagonal states")
            diags.append(np.real(np.diag(rho)))
        v1, v2 = diags
        # Combination with zero weight on the dark level gives the residual.
        if abs(v1[1]) >= abs(v2[1]):
            combo = v2 * v1[1] - v1 * v2[1]
        else:
            combo = v1 * v2[1] - v2 * v1[1]
        residual = _normalize_populations(combo)
        return SteadyStateFamily(dark=DARK_STATE.copy(), residual=residual)
    raise NullspaceDimensionError(f"kernel dimension {dim} outside {{1, 2}}")
