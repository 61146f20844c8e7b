"""Collective emission and guided-mode scattering for 1D chains of two-level emitters.

Natural units throughout: lengths in units of the resonant wavelength
(lambda0 = 1, so k0 = 2*pi), energies and rates in units of the single-atom
free-space decay rate gamma0 (hbar = 1, c = 1).
"""

from coldchain.core import (
    C,
    DIPOLE_SQ,
    GAMMA0,
    HBAR,
    K0,
    LAMBDA0,
    OMEGA0,
    AtomArray,
    FiberGeometry,
    PolarizationAxis,
    disordered_chain,
    regular_chain,
)
from coldchain.vacuum import (
    LevelShiftMatrix,
    coupling_longitudinal,
    coupling_transverse,
    green0,
    sigma_vacuum,
)
from coldchain.fiber import (
    FresnelSet,
    GuidedMode,
    dispersion_determinant,
    fresnel_coefficients,
    gamma_wg,
    residue_green,
    sigma_fiber,
    sigma_guided,
    solve_he11,
)
from coldchain.spectral import (
    EigenSystem,
    SpectrumTable,
    cross_section_direct,
    cross_section_expanded,
    eigensystem,
    ipr,
    nn_correlation,
    oscillator_strengths,
    three_atom_eigenvalues,
)
from coldchain.scattering import (
    GuidedChannelStrengths,
    channel_strengths,
    reflection_spectrum,
    s_matrix_direct,
    transmission_spectrum,
)
from coldchain.scaling import (
    DisorderStats,
    ScalingResult,
    disorder_ensemble,
    min_decay,
    optimize_period,
    scaling_exponent,
)

__version__ = "0.1.0"

__all__ = [
    "C",
    "DIPOLE_SQ",
    "GAMMA0",
    "HBAR",
    "K0",
    "LAMBDA0",
    "OMEGA0",
    "AtomArray",
    "DisorderStats",
    "EigenSystem",
    "FiberGeometry",
    "FresnelSet",
    "GuidedChannelStrengths",
    "GuidedMode",
    "LevelShiftMatrix",
    "PolarizationAxis",
    "ScalingResult",
    "SpectrumTable",
    "channel_strengths",
    "coupling_longitudinal",
    "coupling_transverse",
    "cross_section_direct",
    "cross_section_expanded",
    "disordered_chain",
    "disorder_ensemble",
    "dispersion_determinant",
    "eigensystem",
    "fresnel_coefficients",
    "gamma_wg",
    "green0",
    "ipr",
    "min_decay",
    "nn_correlation",
    "optimize_period",
    "oscillator_strengths",
    "reflection_spectrum",
    "regular_chain",
    "residue_green",
    "s_matrix_direct",
    "scaling_exponent",
    "sigma_fiber",
    "sigma_guided",
    "sigma_vacuum",
    "solve_he11",
    "three_atom_eigenvalues",
    "transmission_spectrum",
]
