"""Guided-photon scattering matrix: transmission and reflection spectra.

Forward scattering of a guided photon off the chain is

    S_ff(D) = 1 - i gamma_f  u^dag (D I - Sigma)^-1 u,      u_a = e^{i beta z_a},

and the backward amplitude S_bf = -i sqrt(gamma_f gamma_b) u^T (...)^-1 u.
Expanding the resolvent in eigenstates gives per-state forward and reflection
constants f_j (same projection algebra as the vacuum oscillator strengths,
with the photon phases e^{+-i beta z}) and closed Lorentzian-plus-dispersive
forms for T = |S_ff|^2 and R = |S_bf|^2 whose coefficients eta_j, xi_j carry
the cross-resonance interference sums.  Both routes must agree pointwise,
which the tests pin at 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coldchain.core import AtomArray
from coldchain.fiber import GuidedMode, guided_coupling_amplitude
from coldchain.spectral import EigenSystem, SpectrumTable
from coldchain.vacuum import LevelShiftMatrix


@dataclass(frozen=True)
class GuidedChannelStrengths:
    """Eigenstate weights and expansion coefficients of the guided channel.

    ``f_t`` and ``f_r`` are the per-state forward and reflection constants;
    ``eta_t``/``xi_t`` and ``eta_r``/``xi_r`` the Lorentzian and dispersive
    coefficients of the closed transmission and reflection expansions;
    ``gamma_f``/``gamma_b`` the directional emission rates.
    """

    f_t: np.ndarray
    f_r: np.ndarray
    gamma_f: float
    gamma_b: float
    eta_t: np.ndarray
    xi_t: np.ndarray
    eta_r: np.ndarray
    xi_r: np.ndarray


def _cross_resonance(f: np.ndarray, lam: np.ndarray, gamma_b: float) -> np.ndarray:
    """B_j = gamma_b sum_i f_j f_i^* / (lambda_j - lambda_i^*).

    Finite under passivity: Im lambda < 0 for all states keeps every
    denominator away from zero, including i = j.
    """
    denom = lam[:, None] - np.conj(lam)[None, :]
    if np.any(np.abs(denom) < 1e-14):
        raise ArithmeticError(
            "undamped cross term lambda_j == lambda_i^*; passivity violated"
        )
    return gamma_b * np.sum(f[:, None] * np.conj(f)[None, :] / denom, axis=1)


def channel_strengths(
    es: EigenSystem, array: AtomArray, mode: GuidedMode
) -> GuidedChannelStrengths:
    """Project the guided photon phases onto the eigenbasis.

    f_t,j = (e^{-i beta z} . S_:j)(S^-1_j: . e^{+i beta z}) and f_r,j uses
    e^{+i beta z} on both sides.  The directional rates come from the guided
    self energy of the equal-coupling geometry (forward = backward).
    """
    u = np.exp(1j * mode.beta * array.z)
    f_t = (np.conj(u) @ es.transform) * (es.inverse_transform @ u)
    f_r = (u @ es.transform) * (es.inverse_transform @ u)
    g_a, _ = guided_coupling_amplitude(array)
    gamma_f = gamma_b = -g_a.imag
    b_t = _cross_resonance(f_t, es.lambdas, gamma_b)
    b_r = _cross_resonance(f_r, es.lambdas, gamma_b)
    return GuidedChannelStrengths(
        f_t=f_t,
        f_r=f_r,
        gamma_f=float(gamma_f),
        gamma_b=float(gamma_b),
        eta_t=f_t.real - b_t.imag,
        xi_t=f_t.imag + b_t.real,
        eta_r=-b_r.imag,
        xi_r=b_r.real,
    )


def _resonance_sum(
    lam: np.ndarray, eta: np.ndarray, xi: np.ndarray, grid: np.ndarray
) -> np.ndarray:
    """Per-state terms [eta_j l''_j + xi_j (D - l'_j)] / |D - lambda_j|^2."""
    d_re = grid[None, :] - lam.real[:, None]
    denom = d_re**2 + lam.imag[:, None] ** 2
    return (eta[:, None] * lam.imag[:, None] + xi[:, None] * d_re) / denom


def transmission_spectrum(
    cs: GuidedChannelStrengths, es: EigenSystem, grid: np.ndarray
) -> SpectrumTable:
    """T(D) = 1 + 2 gamma_f sum_j resonance terms, per-state partials kept."""
    grid = np.asarray(grid, dtype=float)
    partials = 2.0 * cs.gamma_f * _resonance_sum(es.lambdas, cs.eta_t, cs.xi_t, grid)
    return SpectrumTable(
        detunings=grid,
        total=1.0 + partials.sum(axis=0),
        kind="transmission",
        baseline=1.0,
        partials=partials,
    )


def reflection_spectrum(
    cs: GuidedChannelStrengths, es: EigenSystem, grid: np.ndarray
) -> SpectrumTable:
    """R(D) = 2 gamma_f sum_j resonance terms built from the reflection set."""
    grid = np.asarray(grid, dtype=float)
    partials = 2.0 * cs.gamma_f * _resonance_sum(es.lambdas, cs.eta_r, cs.xi_r, grid)
    return SpectrumTable(
        detunings=grid,
        total=partials.sum(axis=0),
        kind="reflection",
        baseline=0.0,
        partials=partials,
    )


def s_matrix_direct(
    sigma: LevelShiftMatrix,
    array: AtomArray,
    mode: GuidedMode,
    grid: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Forward and backward scattering amplitudes by resolvent inversion.

    The independent oracle for the eigenstate expansions: T = |S_ff|^2 and
    R = |S_bf|^2 must match them pointwise.
    """
    if array.fiber is None:
        raise ValueError("guided scattering requires a fiber environment")
    grid = np.asarray(grid, dtype=float)
    g_a, _ = guided_coupling_amplitude(array)
    gamma_f = gamma_b = -g_a.imag
    u = np.exp(1j * mode.beta * array.z)
    n = array.n_atoms
    mats = grid[:, None, None] * np.eye(n)[None, :, :] - sigma.entries[None, :, :]
    rhs = np.broadcast_to(u[None, :, None], (grid.size, n, 1))
    sols = np.linalg.solve(mats, rhs)[:, :, 0]
    s_ff = 1.0 - 1j * gamma_f * (sols @ np.conj(u))
    s_bf = -1j * np.sqrt(gamma_f * gamma_b) * (sols @ u)
    return s_ff, s_bf
