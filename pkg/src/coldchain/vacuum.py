"""Free-space dipole-dipole coupling and the vacuum level-shift matrix.

The N x N complex symmetric matrix Sigma collects the photon-mediated
couplings between emitters: its diagonal holds the single-atom self energy
-i*gamma0/2 (the free-space Lamb shift is absorbed into the transition
frequency), the off-diagonal entries the excitation-transfer amplitudes.
Eigenvalues give collective line shifts (real part) and decay rates
(-2 x imaginary part).

In the natural units of :mod:`coldchain.core` the coupling between two atoms
reduces to Sigma_mn = -(3*pi/k0) * d_hat . G0(r_m, r_n) . d_hat with G0 the
classical free-space dyadic Green's tensor, which for on-axis separations
collapses to the closed transverse/longitudinal forms below.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from coldchain.core import K0, AtomArray, FiberGeometry, PolarizationAxis

# Sigma_mn = COUPLING_PREFACTOR * (d_hat . G . d_hat), gamma0 units.
COUPLING_PREFACTOR = -3.0 * np.pi / K0

G_SELF = -0.5j


@dataclass(frozen=True)
class LevelShiftMatrix:
    """Level-shift operator Sigma(omega0) in units of hbar*gamma0.

    Symmetric (not Hermitian); the environment tag records whether a guided
    channel is included.
    """

    entries: np.ndarray
    fiber: FiberGeometry | None = field(default=None)

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be a square matrix")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def green0(r: np.ndarray, r_prime: np.ndarray, k: complex = K0) -> np.ndarray:
    """Free-space dyadic Green's tensor between two distinct points.

    Closed Cartesian form

        G0 = e^{ikR}/(4 pi R) [ (1 + (ikR - 1)/(kR)^2) I
                                + (3 - 3ikR - (kR)^2)/(kR)^2  Rhat x Rhat ].

    The coincident-point self term is not handled here; it enters Sigma
    through the -i/2 diagonal.
    """
    R = np.asarray(r, dtype=float) - np.asarray(r_prime, dtype=float)
    Rn = float(np.linalg.norm(R))
    if Rn == 0.0:
        raise ValueError("green0 requires r != r_prime")
    Rhat = R / Rn
    kR = k * Rn
    pref = np.exp(1j * kR) / (4.0 * np.pi * Rn)
    iso = 1.0 + (1j * kR - 1.0) / kR**2
    rad = (3.0 - 3j * kR - kR**2) / kR**2
    return pref * (iso * np.eye(3) + rad * np.outer(Rhat, Rhat))


def coupling_transverse(dz):
    """Coupling of two transverse dipoles separated by dz along the chain.

    g_perp = -(3/4) e^{i k0 dz} [ 1/(k0 dz) + i/(k0 dz)^2 - 1/(k0 dz)^3 ]

    in gamma0 units; carries near-, intermediate- and far-field terms.
    Accepts scalars or arrays of positive separations.
    """
    dz = np.asarray(dz, dtype=float)
    if np.any(dz <= 0):
        raise ValueError("separation must be positive")
    x = K0 * dz
    g = -0.75 * np.exp(1j * x) * (1.0 / x + 1j / x**2 - 1.0 / x**3)
    return complex(g) if g.ndim == 0 else g


def coupling_longitudinal(dz):
    """Coupling of two longitudinal dipoles; no far-field 1/(k0 dz) term.

    g_par = -(3/2) e^{i k0 dz} [ -i/(k0 dz)^2 + 1/(k0 dz)^3 ]
    """
    dz = np.asarray(dz, dtype=float)
    if np.any(dz <= 0):
        raise ValueError("separation must be positive")
    x = K0 * dz
    g = -1.5 * np.exp(1j * x) * (-1j / x**2 + 1.0 / x**3)
    return complex(g) if g.ndim == 0 else g


def _coupling_general(array: AtomArray) -> np.ndarray:
    """Pairwise couplings via the dyadic Green's tensor (off-axis geometries)."""
    n = array.n_atoms
    d_hat = array.axis.unit_vector
    sig = np.zeros((n, n), dtype=complex)
    for m in range(n):
        for l in range(m + 1, n):
            g = d_hat @ green0(array.positions[m], array.positions[l]) @ d_hat
            sig[m, l] = sig[l, m] = COUPLING_PREFACTOR * g
    return sig


def sigma_vacuum(array: AtomArray) -> LevelShiftMatrix:
    """Assemble the vacuum level-shift matrix for an atom array.

    For chains along z (the only geometry the builders produce) the entries
    come from the closed transverse/longitudinal coupling constants; arbitrary
    position sets fall back to the dyadic Green's tensor.  Both routes agree
    to rounding and the equivalence is covered by tests.
    """
    if array.is_fiber:
        raise ValueError("array is in a fiber environment; use sigma_fiber")
    n = array.n_atoms
    pos = array.positions
    on_axis = np.allclose(pos[:, 0], pos[0, 0]) and np.allclose(pos[:, 1], pos[0, 1])
    if on_axis:
        dz = np.abs(pos[:, None, 2] - pos[None, :, 2])
        off = ~np.eye(n, dtype=bool)
        coupling = (
            coupling_transverse
            if array.axis is PolarizationAxis.TRANSVERSE_X
            else coupling_longitudinal
        )
        sig = np.zeros((n, n), dtype=complex)
        if n > 1:
            sig[off] = coupling(dz[off])
    else:
        sig = _coupling_general(array)
    sig[np.diag_indices(n)] = G_SELF
    return LevelShiftMatrix(sig, fiber=None)
