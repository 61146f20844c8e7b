"""Eigen-analysis of the level-shift matrix and spectral observables.

Diagonalizing the non-Hermitian Sigma yields the collective eigenstates:
complex eigenvalues lambda_j (shift = Re, decay rate = -2 Im) and the
transform S whose columns are right eigenvectors.  The scattering cross
section then splits into one resonance term per eigenstate weighted by a
complex oscillator strength f_j, with sum rule sum_j f_j = N.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from coldchain.core import K0, AtomArray
from coldchain.vacuum import LevelShiftMatrix

# Per-state cross-section prefactor in lambda0^2 units.
CROSS_SECTION_PREFACTOR = -3.0 * np.pi / K0**2

DEGENERACY_GAP = 1e-10


class ConditioningError(ArithmeticError):
    """Eigendecomposition failed to reconstruct the matrix accurately."""


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigendecomposition of a level-shift matrix.

    States are ordered by decay rate gamma_j = -2 Im lambda_j ascending,
    ties broken by Re lambda_j ascending, so index 0 is always the most
    subradiant state.  For a symmetric matrix the columns of ``transform``
    are normalized bilinearly (v^T v = 1) whenever possible, which makes the
    inverse transform the plain transpose up to rounding.
    """

    lambdas: np.ndarray
    transform: np.ndarray
    inverse_transform: np.ndarray
    decay_rates: np.ndarray
    degenerate: bool = field(default=False)
    residual: float = field(default=0.0)

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]


def eigensystem(sigma: LevelShiftMatrix) -> EigenSystem:
    """Full complex eigendecomposition with deterministic state ordering.

    Raises :class:`ConditioningError` when the reconstruction residual
    ||S diag(lambda) S^-1 - Sigma|| exceeds 1e-8 ||Sigma||, which signals a
    numerically defective matrix.
    """
    m = sigma.entries
    if not np.all(np.isfinite(m)):
        raise ValueError("level-shift matrix has non-finite entries")
    lam, vecs = np.linalg.eig(m)
    gamma = -2.0 * lam.imag
    order = np.lexsort((lam.real, gamma))
    lam = lam[order]
    vecs = vecs[:, order]

    gaps = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(gaps, np.inf)
    degenerate = bool(np.min(gaps) < DEGENERACY_GAP)
    if degenerate:
        warnings.warn(
            "near-degenerate eigenvalues: per-state quantities are only "
            "meaningful as sums over the degenerate cluster",
            RuntimeWarning,
            stacklevel=2,
        )

    symmetric = np.allclose(m, m.T, rtol=0, atol=1e-12 * max(np.abs(m).max(), 1.0))
    if symmetric and not degenerate:
        # bilinear normalization v^T v = 1 makes S^-1 = S^T available
        bilinear = np.sum(vecs * vecs, axis=0)
        if np.all(np.abs(bilinear) > 1e-8):
            vecs = vecs / np.sqrt(bilinear)[None, :]
    inverse = np.linalg.inv(vecs)

    norm = np.linalg.norm(m)
    residual = float(np.linalg.norm((vecs * lam[None, :]) @ inverse - m))
    if norm > 0 and residual > 1e-8 * norm:
        raise ConditioningError(
            f"eigendecomposition residual {residual:.3e} exceeds "
            f"1e-8 * ||Sigma|| = {1e-8 * norm:.3e}"
        )
    lam.setflags(write=False)
    vecs.setflags(write=False)
    inverse.setflags(write=False)
    gamma_sorted = -2.0 * lam.imag
    gamma_sorted.setflags(write=False)
    return EigenSystem(
        lambdas=lam,
        transform=vecs,
        inverse_transform=inverse,
        decay_rates=gamma_sorted,
        degenerate=degenerate,
        residual=residual,
    )


def three_atom_eigenvalues(g_self: complex, g1: complex, g2: complex) -> np.ndarray:
    """Closed-form eigenvalues of the 3-site symmetric Toeplitz coupling matrix.

    For Sigma = [[g_self, g1, g2], [g1, g_self, g1], [g2, g1, g_self]]:

        lambda_1 = (2 g_self + g2 + sqrt(8 g1^2 + g2^2)) / 2
        lambda_2 = g_self - g2
        lambda_3 = (2 g_self + g2 - sqrt(8 g1^2 + g2^2)) / 2
    """
    root = np.sqrt(8.0 * g1 * g1 + g2 * g2)
    return np.array(
        [
            0.5 * (2.0 * g_self + g2 + root),
            g_self - g2,
            0.5 * (2.0 * g_self + g2 - root),
        ]
    )


def oscillator_strengths(
    es: EigenSystem, array: AtomArray, k_vec: np.ndarray
) -> np.ndarray:
    """Complex weights of each eigenstate in the cross-section expansion.

    f_j = (row of e^{-i k.r} projected on column j of S) times
    (row j of S^-1 projected on e^{+i k.r}); they sum to N for any geometry
    and photon direction with |k| = k0.
    """
    k_vec = np.asarray(k_vec, dtype=float)
    if not np.isclose(np.linalg.norm(k_vec), K0, rtol=1e-9):
        raise ValueError("photon wavevector must have magnitude k0")
    phase = np.exp(1j * array.positions @ k_vec)
    return (np.conj(phase) @ es.transform) * (es.inverse_transform @ phase)


@dataclass(frozen=True)
class SpectrumTable:
    """Detuning grid with per-eigenstate partials and the total observable.

    ``total`` equals ``baseline`` plus the sum of partials on every grid
    point (baseline 0 for cross sections and reflection, 1 for transmission).
    ``partials`` is None for observables computed by direct inversion, which
    have no per-state split.
    """

    detunings: np.ndarray
    total: np.ndarray
    kind: str
    baseline: float = field(default=0.0)
    partials: np.ndarray | None = field(default=None)


def cross_section_expanded(
    es: EigenSystem, strengths: np.ndarray, grid: np.ndarray
) -> SpectrumTable:
    """Total scattering cross section as a sum over eigenstate resonances.

    Each partial is a Lorentzian (weight Re f_j) plus a dispersive term
    (weight Im f_j) centered on the state's shifted resonance:

        sigma_j = -(3 pi / k0^2) [f'_j l''_j + f''_j (D - l'_j)]
                   / [(D - l'_j)^2 + l''_j^2].
    """
    grid = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(grid)):
        raise ValueError("detuning grid must be finite")
    lam = es.lambdas
    denom = (grid[None, :] - lam.real[:, None]) ** 2 + lam.imag[:, None] ** 2
    numer = (
        strengths.real[:, None] * lam.imag[:, None]
        + strengths.imag[:, None] * (grid[None, :] - lam.real[:, None])
    )
    partials = CROSS_SECTION_PREFACTOR * numer / denom
    return SpectrumTable(
        detunings=grid,
        total=partials.sum(axis=0),
        kind="cross-section",
        baseline=0.0,
        partials=partials,
    )


def cross_section_direct(
    sigma: LevelShiftMatrix,
    array: AtomArray,
    k_vec: np.ndarray,
    grid: np.ndarray,
) -> SpectrumTable:
    """Cross section by resolvent inversion on every grid point.

    Independent of the eigen-expansion route; the two must agree to
    1e-9 relative, which the tests enforce.
    """
    k_vec = np.asarray(k_vec, dtype=float)
    grid = np.asarray(grid, dtype=float)
    phase = np.exp(1j * array.positions @ k_vec)
    n = sigma.n
    mats = grid[:, None, None] * np.eye(n)[None, :, :] - sigma.entries[None, :, :]
    rhs = np.broadcast_to(phase[None, :, None], (grid.size, n, 1))
    sols = np.linalg.solve(mats, rhs)[:, :, 0]
    proj = sols @ np.conj(phase)
    total = CROSS_SECTION_PREFACTOR * proj.imag
    return SpectrumTable(
        detunings=grid,
        total=total,
        kind="cross-section",
        baseline=0.0,
        partials=None,
    )


def nn_correlation(es: EigenSystem, j: int) -> float:
    """Mean cosine of phase steps between neighboring eigenvector components.

    +1 for fully in-phase neighboring dipoles, -1 for alternating phases.
    Zero-amplitude components get phase 0 and trigger a warning, since their
    phase is undefined.
    """
    c = es.transform[:, j]
    if c.size < 2:
        raise ValueError("need at least two atoms for a neighbor correlation")
    if np.any(c == 0):
        warnings.warn(
            "zero-amplitude eigenvector component: phase taken as 0",
            RuntimeWarning,
            stacklevel=2,
        )
    phi = np.angle(c)
    return float(np.mean(np.cos(np.diff(phi))))


def ipr(es: EigenSystem, j: int) -> float:
    """Inverse participation ratio of eigenstate j.

    1 / sum_i |c_i|^4 for the probability-normalized eigenvector: 1 for a
    single-site excitation, N for a uniformly spread state.
    """
    c = es.transform[:, j]
    c = c / np.linalg.norm(c)
    return float(1.0 / np.sum(np.abs(c) ** 4))
