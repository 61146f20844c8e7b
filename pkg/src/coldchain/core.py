"""Domain types, unit conventions and chain geometry builders.

Unit convention
---------------
All lengths are measured in units of the resonant wavelength lambda0 and all
energies, detunings and decay rates in units of the single-atom free-space
emission rate gamma0, with hbar = 1 and c = 1.  Consequently k0 = 2*pi and
an isolated atom decays at rate exactly 1.  The squared dipole moment
consistent with a unit emission rate is d^2 = 3 gamma0 c^3 / (4 omega0^3).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

LAMBDA0 = 1.0
K0 = 2.0 * np.pi
GAMMA0 = 1.0
HBAR = 1.0
C = 1.0
OMEGA0 = K0 * C
DIPOLE_SQ = 3.0 * GAMMA0 * C**3 / (4.0 * OMEGA0**3)


class PolarizationAxis(Enum):
    """Dipole orientation relative to the chain axis z.

    For fiber geometries all atoms sit on the phi = 0 line, so TRANSVERSE_X
    coincides with the radial direction of the cylinder.
    """

    TRANSVERSE_X = "transverse"
    LONGITUDINAL_Z = "longitudinal"

    @property
    def unit_vector(self) -> np.ndarray:
        if self is PolarizationAxis.TRANSVERSE_X:
            return np.array([1.0, 0.0, 0.0])
        return np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class FiberGeometry:
    """Step-index dielectric cylinder with atoms trapped outside it.

    Parameters
    ----------
    radius : float
        Cylinder radius rho_c in units of lambda0.
    permittivity : float
        Real relative permittivity of the cylinder, > 1.
    atom_offset : float
        Distance of the trapping line from the cylinder surface, >= 0.
    """

    radius: float
    permittivity: float
    atom_offset: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"fiber radius must be positive, got {self.radius}")
        if not self.permittivity > 1:
            raise ValueError(
                f"fiber permittivity must exceed 1, got {self.permittivity}"
            )
        if self.atom_offset < 0:
            raise ValueError(f"atom offset must be >= 0, got {self.atom_offset}")

    @property
    def atom_radius(self) -> float:
        """Radial coordinate of the trapping line."""
        return self.radius + self.atom_offset


@dataclass(frozen=True)
class AtomArray:
    """Emitter positions, common dipole axis and coupling environment.

    ``fiber is None`` means free space.  Positions are Cartesian 3-vectors in
    lambda0 units; for fiber environments the trapping line lies on the x axis
    (phi = 0), so x is the radial coordinate.
    """

    positions: np.ndarray
    axis: PolarizationAxis
    fiber: FiberGeometry | None = field(default=None)

    def __post_init__(self) -> None:
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must be an (N, 3) array with N >= 1")
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        np.fill_diagonal(dist, np.inf)
        if np.min(dist) <= 0.0:
            raise ValueError("atom positions must be pairwise distinct")
        if self.fiber is not None:
            rho = np.hypot(pos[:, 0], pos[:, 1])
            if np.any(rho <= self.fiber.radius):
                raise ValueError("all atoms must sit strictly outside the cylinder")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n_atoms(self) -> int:
        return self.positions.shape[0]

    @property
    def z(self) -> np.ndarray:
        return self.positions[:, 2]

    @property
    def is_fiber(self) -> bool:
        return self.fiber is not None


def regular_chain(
    n: int,
    period: float,
    axis: PolarizationAxis = PolarizationAxis.TRANSVERSE_X,
    fiber: FiberGeometry | None = None,
) -> AtomArray:
    """Build a periodic chain of ``n`` atoms along z with spacing ``period``.

    Sites sit at z_j = (j - 1) * period.  In a fiber environment every atom is
    placed on the phi = 0 trapping line at radial distance radius + offset.
    """
    if n < 1:
        raise ValueError(f"need at least one atom, got n={n}")
    if not period > 0:
        raise ValueError(f"period must be positive, got {period}")
    z = np.arange(n) * period
    x = fiber.atom_radius if fiber is not None else 0.0
    pos = np.column_stack([np.full(n, x), np.zeros(n), z])
    return AtomArray(pos, axis, fiber)


def disordered_chain(
    n: int,
    period: float,
    delta_a: float,
    seed: "int | np.random.SeedSequence",
    axis: PolarizationAxis = PolarizationAxis.TRANSVERSE_X,
    fiber: FiberGeometry | None = None,
) -> AtomArray:
    """Regular chain with each z shifted by 2 * delta_a * u, u ~ U(0, 1).

    The displacement is drawn per site from a PCG64 generator seeded with
    ``seed`` (an integer or a spawned SeedSequence), so a fixed seed
    reproduces positions bit for bit.
    """
    if delta_a < 0:
        raise ValueError(f"delta_a must be >= 0, got {delta_a}")
    base = regular_chain(n, period, axis, fiber)
    if delta_a == 0.0:
        return base
    rng = np.random.Generator(np.random.PCG64(seed))
    pos = np.array(base.positions)
    pos[:, 2] += 2.0 * delta_a * rng.random(n)
    return AtomArray(pos, axis, fiber)
