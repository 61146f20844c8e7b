import numpy as np
import pytest
from scipy import stats

from coldchain import (
    K0,
    LAMBDA0,
    AtomArray,
    FiberGeometry,
    PolarizationAxis,
    disordered_chain,
    regular_chain,
)


def test_unit_convention():
    assert K0 * LAMBDA0 == pytest.approx(2 * np.pi, abs=0)


def test_single_atom_chain():
    arr = regular_chain(1, 0.3, PolarizationAxis.TRANSVERSE_X)
    np.testing.assert_allclose(arr.positions, [[0.0, 0.0, 0.0]])


def test_three_atom_subradiant_period():
    arr = regular_chain(3, 0.14)
    np.testing.assert_allclose(arr.z, [0.0, 0.14, 0.28])


def test_ten_atom_chain_extent():
    arr = regular_chain(10, 0.23)
    assert arr.n_atoms == 10
    np.testing.assert_allclose(np.diff(arr.z), 0.23)
    assert arr.z.max() == pytest.approx(2.07)


def test_regular_chain_affine_spacing():
    # z_j = j * period exactly; successive differences match to a few ulps
    for n, p in [(2, 0.11), (17, 0.3), (64, 0.241)]:
        arr = regular_chain(n, p)
        np.testing.assert_array_equal(arr.z, np.arange(n) * p)
        np.testing.assert_allclose(np.diff(arr.z), p, rtol=1e-13, atol=0)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        regular_chain(0, 0.3)
    with pytest.raises(ValueError):
        regular_chain(3, -0.1)
    with pytest.raises(ValueError):
        regular_chain(3, 0.0)
    with pytest.raises(ValueError):
        disordered_chain(3, 0.3, -1e-3, seed=1)


def test_duplicate_positions_rejected():
    pos = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        AtomArray(pos, PolarizationAxis.TRANSVERSE_X)


def test_fiber_geometry_validation():
    with pytest.raises(ValueError):
        FiberGeometry(-0.1, 2.1, 0.25)
    with pytest.raises(ValueError):
        FiberGeometry(0.25, 1.0, 0.25)
    with pytest.raises(ValueError):
        FiberGeometry(0.25, 2.1, -0.1)


def test_fiber_chain_on_trapping_line():
    geom = FiberGeometry(0.25, 2.1, 0.25)
    arr = regular_chain(4, 0.2, fiber=geom)
    np.testing.assert_allclose(arr.positions[:, 0], 0.5)
    np.testing.assert_allclose(arr.positions[:, 1], 0.0)


def test_atoms_inside_cylinder_rejected():
    geom = FiberGeometry(0.25, 2.1, 0.25)
    pos = np.array([[0.2, 0.0, 0.0], [0.5, 0.0, 0.3]])
    with pytest.raises(ValueError):
        AtomArray(pos, PolarizationAxis.TRANSVERSE_X, geom)


def test_positions_immutable():
    arr = regular_chain(3, 0.2)
    with pytest.raises(ValueError):
        arr.positions[0, 2] = 1.0


def test_zero_disorder_is_regular():
    reg = regular_chain(8, 0.25)
    dis = disordered_chain(8, 0.25, 0.0, seed=42)
    np.testing.assert_array_equal(reg.positions, dis.positions)


def test_disorder_bound():
    # displacements stay within [0, 2 * delta_a]
    delta_a = 5e-4
    reg = regular_chain(20, 0.24)
    dis = disordered_chain(20, 0.24, delta_a, seed=7)
    shift = dis.z - reg.z
    assert np.all(shift >= 0.0)
    assert np.all(shift <= 2 * delta_a)
    assert np.max(np.abs(shift)) <= 1e-3


def test_disorder_deterministic():
    a = disordered_chain(30, 0.24, 1e-2, seed=123)
    b = disordered_chain(30, 0.24, 1e-2, seed=123)
    np.testing.assert_array_equal(a.positions, b.positions)
    c = disordered_chain(30, 0.24, 1e-2, seed=124)
    assert np.any(c.positions != a.positions)


def test_disorder_uniformity_ks():
    # pooled displacements over 10^4 samples look uniform on [0, 2 delta_a]
    delta_a = 1e-2
    n, chains = 100, 100
    reg = regular_chain(n, 0.24)
    samples = np.concatenate(
        [
            disordered_chain(n, 0.24, delta_a, seed=s).z - reg.z
            for s in range(chains)
        ]
    )
    assert samples.size == 10_000
    u = samples / (2 * delta_a)
    assert stats.kstest(u, "uniform").pvalue > 0.01


def test_polarization_unit_vectors():
    np.testing.assert_array_equal(
        PolarizationAxis.TRANSVERSE_X.unit_vector, [1.0, 0.0, 0.0]
    )
    np.testing.assert_array_equal(
        PolarizationAxis.LONGITUDINAL_Z.unit_vector, [0.0, 0.0, 1.0]
    )
