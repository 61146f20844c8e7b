"""Guided-mode machinery for a dielectric nanofiber.

The cylinder's scattering Green's tensor is expanded in cylindrical vector
wave functions; the guided HE11 mode shows up as a pair of real poles of the
Fresnel coefficients at k_z = +-beta inside the window (k0, sqrt(eps)*k0).
This module locates the pole, extracts its residue by contour closure, and
assembles the fiber-environment level-shift matrix

    Sigma = Sigma_vacuum + Sigma_guided,

where the guided part couples every atom pair (including m = n) through the
evanescent tail of the mode with the infinite-range phase e^{i beta |z_m-z_n|}.

Only the fundamental-mode pole is kept; the branch-cut (radiation-mode)
correction to the scattering tensor is not included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from coldchain.core import K0, AtomArray, FiberGeometry
from coldchain.specfun import bessel_j, hankel1
from coldchain.vacuum import COUPLING_PREFACTOR, LevelShiftMatrix, sigma_vacuum

# Relative margin keeping the root bracket away from the branch points where
# the determinant diverges.
_WINDOW_MARGIN = 1e-9
_SCAN_POINTS = 2000


class SingleModeError(ValueError):
    """Geometry does not support exactly one guided root of the n=1 family."""


class DegeneratePoleError(ArithmeticError):
    """The dispersion determinant has a vanishing slope at the located pole."""


@dataclass(frozen=True)
class FresnelSet:
    """Outside-to-outside cylinder scattering coefficients at one (n, k_z).

    The four amplitudes mix TE-like (M) and TM-like (N) waves on reflection;
    they share the common denominator ``dt`` whose zeros are guided modes.
    """

    r_mm: complex
    r_mn: complex
    r_nm: complex
    r_nn: complex
    dt: complex


@dataclass(frozen=True)
class GuidedMode:
    """Fundamental guided mode of the fiber at the atomic resonance.

    Attributes
    ----------
    beta : float
        Propagation constant, k0 < beta < sqrt(eps) * k0.
    dt_slope : complex
        d(DT)/dk_z at the forward pole, common to n = +-1.
    group_slope : float
        d(beta)/dk at the resonance, by centered finite difference.
    n_harmonics : tuple[int, ...]
        Azimuthal orders contributing (+-1 for HE11).
    residue_data : dict[int, np.ndarray]
        Per-order forward-pole residue tensors of the scattering Green's
        function, evaluated at the trap radius with the propagation phase
        stripped; cylindrical components on the phi = 0 line.
    residual : float
        |DT(beta)| left by the root polish.
    scale : float
        Magnitude of the cancelling determinant terms at the root, the
        natural yardstick for ``residual``.
    """

    beta: float
    dt_slope: complex
    group_slope: float
    n_harmonics: tuple[int, ...]
    residue_data: dict[int, np.ndarray]
    residual: float
    scale: float


def _kr(ksq: complex, kz: complex) -> complex:
    """Transverse wavenumber sqrt(k^2 - kz^2) on the Im >= 0 branch."""
    s = complex(np.sqrt(complex(ksq - kz * kz)))
    if s.imag < 0:
        s = -s
    return s


def _determinant_terms(
    n: int, kz: complex, geom: FiberGeometry, k0: float
) -> tuple[complex, complex]:
    """The two cancelling contributions whose sum is the determinant."""
    k1 = k0
    k2 = math.sqrt(geom.permittivity) * k0
    rc = geom.radius
    kr1 = _kr(k1 * k1, kz)
    kr2 = _kr(k2 * k2, kz)
    if kr1 == 0 or kr2 == 0:
        raise ValueError("k_z at a branch point of the transverse wavenumber")
    j2 = bessel_j(n, kr2 * rc)
    h1 = hankel1(n, kr1 * rc)
    hybrid = -((1.0 / kr2**2 - 1.0 / kr1**2) ** 2) * kz**2 * n**2
    te = j2.derivative / (kr2 * j2.value) - h1.derivative / (kr1 * h1.value)
    tm = (
        j2.derivative * k2**2 / (kr2 * j2.value)
        - h1.derivative * k1**2 / (kr1 * h1.value)
    )
    return hybrid, te * tm * rc**2


def dispersion_determinant(
    n: int, kz: complex, geom: FiberGeometry, k0: float = K0
) -> complex:
    """Common denominator DT(k_z) of the cylinder Fresnel coefficients.

    Real for real k_z on the guided segment (k0, sqrt(eps)*k0); its zeros
    there are the guided-mode propagation constants.
    """
    t1, t2 = _determinant_terms(n, kz, geom, k0)
    return t1 + t2


def _fresnel_numerators(
    n: int, kz: complex, geom: FiberGeometry, k0: float = K0
) -> tuple[complex, complex, complex]:
    """Numerators (R_AB * DT) of the outside-outside Fresnel coefficients.

    Returns (num_MM, num_NM, num_NN); num_MN equals num_NM.
    """
    k1 = k0
    k2 = math.sqrt(geom.permittivity) * k0
    rc = geom.radius
    kr1 = _kr(k1 * k1, kz)
    kr2 = _kr(k2 * k2, kz)
    j2 = bessel_j(n, kr2 * rc)
    j1 = bessel_j(n, kr1 * rc)
    h1 = hankel1(n, kr1 * rc)
    pref = j1.value / h1.value
    hybrid = (1.0 / kr2**2 - 1.0 / kr1**2) ** 2 * kz**2 * n**2
    j2_t = j2.derivative / (kr2 * j2.value)
    j1_t = j1.derivative / (kr1 * j1.value)
    h1_t = h1.derivative / (kr1 * h1.value)
    num_mm = pref * (hybrid - (j2_t - j1_t) * (j2_t * k2**2 - h1_t * k1**2) * rc**2)
    num_nn = pref * (hybrid - (j2_t - h1_t) * (j2_t * k2**2 - j1_t * k1**2) * rc**2)
    num_nm = (
        pref
        * (1.0 / kr1)
        * (1.0 / kr1**2 - 1.0 / kr2**2)
        * (j1.derivative / j1.value - h1.derivative / h1.value)
        * k1
        * kz
        * n
        * rc
    )
    return num_mm, num_nm, num_nn


def fresnel_coefficients(
    n: int, kz: complex, geom: FiberGeometry, k0: float = K0
) -> FresnelSet:
    """Evaluate the outside-outside Fresnel coefficient block at (n, k_z)."""
    det = dispersion_determinant(n, kz, geom, k0)
    num_mm, num_nm, num_nn = _fresnel_numerators(n, kz, geom, k0)
    return FresnelSet(
        r_mm=num_mm / det,
        r_mn=num_nm / det,
        r_nm=num_nm / det,
        r_nn=num_nn / det,
        dt=det,
    )


def _guided_roots(geom: FiberGeometry, k0: float, n: int = 1) -> list[float]:
    """All zeros of the real determinant on the guided segment.

    Sign changes of Re DT are bracketed on a fine grid and polished with a
    hybrid bisection/secant solver; sign flips across determinant poles are
    rejected by the residual check.
    """
    lo = k0 * (1.0 + _WINDOW_MARGIN)
    hi = math.sqrt(geom.permittivity) * k0 * (1.0 - _WINDOW_MARGIN)
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    vals = np.array(
        [dispersion_determinant(n, kz, geom, k0).real for kz in grid]
    )
    roots = []
    flips = np.where(np.sign(vals[:-1]) != np.sign(vals[1:]))[0]
    for i in flips:
        root = brentq(
            lambda kz: dispersion_determinant(n, kz, geom, k0).real,
            grid[i],
            grid[i + 1],
            xtol=1e-15,
            rtol=8.9e-16,
        )
        t1, t2 = _determinant_terms(n, root, geom, k0)
        scale = abs(t1) + abs(t2)
        if abs(t1 + t2) < 1e-10 * scale:
            roots.append(float(root))
    return roots


def _beta_at(geom: FiberGeometry, k0: float, guess: float) -> float:
    """Track the guided root when the optical frequency is perturbed."""
    f = lambda kz: dispersion_determinant(1, kz, geom, k0).real
    for half_width in (3e-4 * k0, 3e-3 * k0, 3e-2 * k0):
        a = max(guess - half_width, k0 * (1.0 + _WINDOW_MARGIN))
        b = min(guess + half_width, math.sqrt(geom.permittivity) * k0 * (1.0 - _WINDOW_MARGIN))
        if a < b and f(a) * f(b) < 0:
            return brentq(f, a, b, xtol=1e-15, rtol=8.9e-16)
    raise SingleModeError("lost the guided root while perturbing the frequency")


def _dt_slope(geom: FiberGeometry, beta: float, k0: float) -> complex:
    """d(DT)/dk_z at the pole: centered difference, one Richardson step."""
    h = 1e-6 * k0
    f = lambda kz: dispersion_determinant(1, kz, geom, k0)
    d_h = (f(beta + h) - f(beta - h)) / (2.0 * h)
    d_h2 = (f(beta + h / 2) - f(beta - h / 2)) / h
    return (4.0 * d_h2 - d_h) / 3.0


def _vwf_hankel(n: int, kz: float, k: float, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """Receiver-side TE/TM vector wave functions, Hankel radial dependence.

    Cylindrical (rho, phi, z) components with the azimuthal and axial phase
    factors stripped.
    """
    kr = _kr(k * k, kz)
    h = hankel1(n, kr * rho)
    m_vec = np.array([1j * n * h.value / rho, -kr * h.derivative, 0.0], dtype=complex)
    n_vec = np.array(
        [
            1j * kz * kr * h.derivative / k,
            -n * kz * h.value / (rho * k),
            kr**2 * h.value / k,
        ],
        dtype=complex,
    )
    return m_vec, n_vec


def _vwf_hankel_bar(n: int, kz: float, k: float, rho: float) -> tuple[np.ndarray, np.ndarray]:
    """Source-side counterparts of :func:`_vwf_hankel` (sign-flipped rho rows)."""
    kr = _kr(k * k, kz)
    h = hankel1(n, kr * rho)
    m_bar = np.array([-1j * n * h.value / rho, -kr * h.derivative, 0.0], dtype=complex)
    n_bar = np.array(
        [
            -1j * kz * kr * h.derivative / k,
            -n * kz * h.value / (rho * k),
            kr**2 * h.value / k,
        ],
        dtype=complex,
    )
    return m_bar, n_bar


def _residue_amplitude(
    geom: FiberGeometry,
    beta: float,
    dt_slope: complex,
    n: int,
    sign: int,
    rho: float,
    rho_prime: float,
    k0: float,
) -> np.ndarray:
    """Pole contribution of harmonic n at k_z = sign*beta, phase stripped.

    Closing the k_z contour in the half-plane selected by sign(z - z') picks
    up 2*pi*i times the residue; both closures reduce to

        -(1/4) * numerator(n, sign*beta) / (k_rho1^2 * DT'(+beta))

    times the propagation phase e^{i beta |z - z'|} appended by the caller.
    Cylindrical components, azimuthal phases excluded.
    """
    p = sign * beta
    kr1sq = complex(k0 * k0 - p * p)
    num_mm, num_nm, num_nn = _fresnel_numerators(n, p, geom, k0)
    m_vec, n_vec = _vwf_hankel(n, p, k0, rho)
    m_bar, n_bar = _vwf_hankel_bar(n, p, k0, rho_prime)
    tensor = np.outer(num_mm * m_vec + num_nm * n_vec, m_bar) + np.outer(
        num_nm * m_vec + num_nn * n_vec, n_bar
    )
    return -0.25 * tensor / (kr1sq * dt_slope)


def solve_he11(geom: FiberGeometry, k0: float = K0) -> GuidedMode:
    """Locate the fundamental guided mode and precompute its pole data.

    Raises :class:`SingleModeError` unless the n = 1 dispersion relation has
    exactly one root in the guided window, and :class:`DegeneratePoleError`
    if the determinant slope there is too small to resolve the residue.
    """
    return _solve_he11_cached(geom, float(k0))


@lru_cache(maxsize=32)
def _solve_he11_cached(geom: FiberGeometry, k0: float) -> GuidedMode:
    roots = _guided_roots(geom, k0)
    if len(roots) != 1:
        raise SingleModeError(
            f"expected exactly one guided root, found {len(roots)} "
            f"for radius={geom.radius}, permittivity={geom.permittivity}"
        )
    beta = roots[0]
    t1, t2 = _determinant_terms(1, beta, geom, k0)
    scale = abs(t1) + abs(t2)
    residual = abs(t1 + t2)
    slope = _dt_slope(geom, beta, k0)
    if abs(slope) < 1e-8 * scale / k0:
        raise DegeneratePoleError(
            f"determinant slope {abs(slope):.3e} too small at beta={beta}"
        )
    dk = 1e-5 * k0
    beta_plus = _beta_at(geom, k0 + dk, beta)
    beta_minus = _beta_at(geom, k0 - dk, beta)
    group_slope = (beta_plus - beta_minus) / (2.0 * dk)
    rho_a = geom.atom_radius
    residue_data = {
        n: _residue_amplitude(geom, beta, slope, n, +1, rho_a, rho_a, k0)
        for n in (-1, 1)
    }
    for tensor in residue_data.values():
        tensor.setflags(write=False)
    return GuidedMode(
        beta=float(beta),
        dt_slope=complex(slope),
        group_slope=float(group_slope),
        n_harmonics=(-1, 1),
        residue_data=residue_data,
        residual=float(residual),
        scale=float(scale),
    )


def _cyl_to_cart(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def residue_green(
    mode: GuidedMode,
    r: np.ndarray,
    r_prime: np.ndarray,
    geom: FiberGeometry,
    k0: float = K0,
) -> np.ndarray:
    """Guided-pole part of the scattering Green's tensor between two points.

    Cartesian 3x3 tensor; both points must lie outside the cylinder.  The
    coincidence point r = r_prime is allowed (the pole contribution stays
    finite there, and the forward and backward closures agree on every entry
    the collinear-dipole projections use).
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(r_prime, dtype=float)
    rho, theta = math.hypot(r[0], r[1]), math.atan2(r[1], r[0])
    rho_p, theta_p = math.hypot(rp[0], rp[1]), math.atan2(rp[1], rp[0])
    if rho <= geom.radius or rho_p <= geom.radius:
        raise ValueError("both points must lie strictly outside the cylinder")
    dz = r[2] - rp[2]
    sign = 1 if dz >= 0 else -1
    phase = np.exp(1j * mode.beta * abs(dz))
    tensor = np.zeros((3, 3), dtype=complex)
    for n in mode.n_harmonics:
        amp = _residue_amplitude(
            geom, mode.beta, mode.dt_slope, n, sign, rho, rho_p, k0
        )
        tensor += amp * np.exp(1j * n * (theta - theta_p))
    tensor *= phase
    if theta == 0.0 and theta_p == 0.0:
        return tensor
    return _cyl_to_cart(theta) @ tensor @ _cyl_to_cart(theta_p).T


def _check_equal_coupling(array: AtomArray) -> None:
    pos = array.positions
    rho = np.hypot(pos[:, 0], pos[:, 1])
    if not (np.allclose(rho, rho[0], rtol=0, atol=1e-12)
            and np.allclose(pos[:, 1], 0.0, atol=1e-12)
            and np.all(pos[:, 0] > 0)):
        raise ValueError(
            "equal-coupling geometry required: all atoms on the phi = 0 "
            "trapping line at a common radial distance"
        )


def guided_coupling_amplitude(array: AtomArray) -> tuple[complex, GuidedMode]:
    """Scalar guided coupling g_A such that Sigma_guided = g_A e^{i beta |dz|}.

    Valid for the equal-coupling trapping-line geometry, where the projection
    of the summed +-1 harmonic residue on the common dipole axis is the same
    for every pair and independent of the closure direction.
    """
    if array.fiber is None:
        raise ValueError("array has no fiber environment")
    _check_equal_coupling(array)
    mode = solve_he11(array.fiber)
    summed = sum(mode.residue_data[n] for n in mode.n_harmonics)
    d_hat = array.axis.unit_vector
    # phi = 0 line: cylindrical components coincide with Cartesian ones
    g_a = COUPLING_PREFACTOR * (d_hat @ summed @ d_hat)
    return complex(g_a), mode


def sigma_guided(array: AtomArray) -> np.ndarray:
    """Guided-channel part of the level-shift matrix, diagonal included."""
    g_a, mode = guided_coupling_amplitude(array)
    z = array.z
    return g_a * np.exp(1j * mode.beta * np.abs(z[:, None] - z[None, :]))


def sigma_fiber(array: AtomArray) -> LevelShiftMatrix:
    """Level-shift matrix near the fiber: vacuum part plus the guided pole."""
    if array.fiber is None:
        raise ValueError("array has no fiber environment; use sigma_vacuum")
    vac = sigma_vacuum(
        AtomArray(np.array(array.positions), array.axis, None)
    ).entries
    return LevelShiftMatrix(vac + sigma_guided(array), fiber=array.fiber)


def gamma_wg(mode: GuidedMode, array: AtomArray, direction: str = "forward") -> float:
    """Per-atom emission rate into one propagation direction of the mode.

    Derived from the guided self term: the mirror-symmetric geometry emits
    equally forward and backward, so each direction carries half of
    -2 Im Sigma_guided,11.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    g_a, _ = guided_coupling_amplitude(array)
    return -g_a.imag
