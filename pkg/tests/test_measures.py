import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.spatial import cKDTree

from sortnet import DataError, UsageError
from sortnet.measures import (
    ArchTimeT,
    EmpiricalMeasure2D,
    arch_density,
    arch_t_mass,
    cell_masses,
    empirical_cell_masses,
    grid_discrepancy,
    permutation_measure,
    sample_arch,
    sample_arch_t,
    support_distances,
    support_hausdorff,
)
from sortnet.sampler import RandomSource, sample_network


def test_density_values():
    assert arch_density(0.0, 0.0) == pytest.approx(1 / (2 * np.pi))
    assert arch_density(1.0, 0.0) == 0.0
    assert arch_density(0.9, 0.9) == 0.0


def test_density_integrates_to_one():
    # polar form: the angular factor cancels the 2 pi
    val, _ = integrate.quad(lambda r: r / np.sqrt(1 - r * r), 0, 1, epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-9)
    # and directly, through the implemented density on the weighted polar grid
    val, _ = integrate.quad(lambda r: 2 * np.pi * r * arch_density(r, 0.0), 0, 1, epsabs=1e-12, limit=200)
    assert val == pytest.approx(1.0, abs=1e-9)


def mass_oracle(t, rect, grid=3000):
    """Arch is the shadow of uniform measure on the sphere: third coordinate
    uniform on [-1, 1], azimuth uniform. Midpoint rule on the indicator."""
    x0, x1, z0, z1 = rect
    c, s = np.cos(np.pi * t), np.sin(np.pi * t)
    u = (np.arange(grid) + 0.5) * 2 / grid - 1
    psi = (np.arange(2 * grid) + 0.5) * np.pi / grid
    rho = np.sqrt(1 - u * u)[:, None]
    x, w = rho * np.cos(psi), rho * np.sin(psi)
    z = c * x + s * w
    return np.mean((x >= x0) & (x <= x1) & (z >= z0) & (z <= z1))


def test_mass_examples():
    half = ArchTimeT(0.5)
    assert arch_t_mass(half, (-1, 1, -1, 1)) == pytest.approx(1.0, abs=1e-12)
    assert arch_t_mass(half, (0, 1, 0, 1)) == pytest.approx(0.25, abs=1e-12)
    assert arch_t_mass(ArchTimeT(0.25), (-1, 1, -1, 1)) == pytest.approx(1.0, abs=1e-9)


def polar_oracle(t, rect, size=400_000):
    rng = np.random.default_rng(0)
    p = sample_arch_t(ArchTimeT(t), size, rng)
    x0, x1, z0, z1 = rect
    return np.mean((p[:, 0] >= x0) & (p[:, 0] < x1) & (p[:, 1] >= z0) & (p[:, 1] < z1))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.02, 0.98), st.lists(st.floats(-1.1, 1.1), min_size=4, max_size=4))
def test_mass_matches_oracle(t, corners):
    x0, x1 = sorted(corners[:2])
    z0, z1 = sorted(corners[2:])
    got = arch_t_mass(ArchTimeT(t), (x0, x1, z0, z1))
    assert got == pytest.approx(mass_oracle(t, (x0, x1, z0, z1)), abs=1e-3)


def test_mass_matches_sampling():
    for t in (0.1, 0.5, 0.8):
        rect = (-0.3, 0.6, -0.2, 0.9)
        assert arch_t_mass(ArchTimeT(t), rect) == pytest.approx(polar_oracle(t, rect), abs=3e-3)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 1), st.floats(-1, 1), st.floats(0, 1))
def test_x_marginal_uniform(t, a, width):
    b = min(a + width, 1.0)
    m = ArchTimeT(t)
    assert arch_t_mass(m, (a, b, -1.5, 1.5)) == pytest.approx((b - a) / 2, abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(-1, 1), st.floats(-1, 1))
def test_mass_additive_and_monotone(t, xs, zs):
    m = ArchTimeT(t)
    whole = arch_t_mass(m, (-0.8, 0.9, -0.7, 0.95))
    left = arch_t_mass(m, (-0.8, xs * 0.8, -0.7, 0.95)) if xs * 0.8 > -0.8 else 0.0
    right = arch_t_mass(m, (max(xs * 0.8, -0.8), 0.9, -0.7, 0.95))
    assert left + right == pytest.approx(whole, abs=1e-9)
    inner = arch_t_mass(m, (-0.5, 0.5, -0.5, zs * 0.4 + 0.5))
    assert inner <= whole + 1e-12


def test_degenerate_masses():
    zero, one = ArchTimeT(0.0), ArchTimeT(1.0)
    assert arch_t_mass(zero, (-1, 0, -1, 0)) == pytest.approx(0.5)
    assert arch_t_mass(zero, (-1, 0, 0, 1)) == 0.0
    assert arch_t_mass(one, (-1, 0, 0, 1)) == pytest.approx(0.5)
    assert arch_t_mass(one, (0, 0.5, -0.5, 0)) == pytest.approx(0.25)


def test_permutation_measure():
    net = sample_network(30, RandomSource(2))
    x = 2 * np.arange(1, 31) / 30 - 1
    m0 = permutation_measure(net, 0.0)
    np.testing.assert_allclose(m0.atoms[:, 0], m0.atoms[:, 1])
    m1 = permutation_measure(net, 1.0)
    np.testing.assert_allclose(m1.atoms[:, 1], -x + 2 / 30, atol=1e-12)
    for t in (0.0, 0.3, 0.5, 1.0):
        emp = permutation_measure(net, t)
        assert len(emp) == 30 and emp.weights.sum() == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(emp.atoms[:, 0], x)
        np.testing.assert_allclose(np.sort(emp.atoms[:, 1]), x)
    with pytest.raises(UsageError):
        permutation_measure(net, 1.5)


def test_empirical_measure_validates():
    with pytest.raises(DataError):
        EmpiricalMeasure2D([[0, 0], [1, 1]], [0.5, 0.6])
    with pytest.raises(DataError):
        EmpiricalMeasure2D([[0, 0]], [1.0, 0.0])


def test_cell_masses_sum():
    for t in (0.0, 0.2, 0.5, 1.0):
        assert cell_masses(ArchTimeT(t), 10).sum() == pytest.approx(1.0, abs=1e-9)


def test_discrepancy_examples():
    origin = EmpiricalMeasure2D([[0.0, 0.0]], [1.0])
    # the atom sits on the corner; histogram puts it in the upper-right cell
    assert grid_discrepancy(origin, ArchTimeT(0.5), 2) == pytest.approx(0.75, abs=1e-9)
    rng = np.random.default_rng(1)
    for t in (0.25, 0.5):
        cloud = EmpiricalMeasure2D.uniform(sample_arch_t(ArchTimeT(t), 10**6, rng))
        assert grid_discrepancy(cloud, ArchTimeT(t), 10) < 0.01
    emp = permutation_measure(sample_network(200, RandomSource(3)), 0.0)
    assert grid_discrepancy(emp, ArchTimeT(0.0), 10) < 0.01


def test_empirical_cells_oracle():
    pts = np.array([[-0.9, -0.9], [0.1, 0.1], [0.99, -0.2], [0.5, 0.5]])
    emp = EmpiricalMeasure2D.uniform(pts)
    cells = empirical_cell_masses(emp, 2)
    assert cells.sum() == pytest.approx(1.0)
    assert cells[0, 0] == pytest.approx(0.25)


def test_arch_sampler_radius_law():
    p = sample_arch(200_000, np.random.default_rng(4))
    r = np.hypot(p[:, 0], p[:, 1])
    for q in (0.3, 0.6, 0.9):
        assert np.mean(r <= q) == pytest.approx(1 - np.sqrt(1 - q * q), abs=5e-3)


def test_support_distances():
    m = ArchTimeT(0.5)
    np.testing.assert_allclose(support_distances([[0, 0], [2, 0], [0, -3], [1, 1]], m),
                               [0, 1, 2, np.sqrt(2) - 1], atol=1e-9)
    m = ArchTimeT(0.25)
    pts = np.random.default_rng(5).uniform(-2, 2, size=(200, 2))
    dense = np.column_stack([np.cos(a := np.linspace(0, 2 * np.pi, 200_000)), np.sin(a)]) @ m.matrix.T
    oracle, _ = cKDTree(dense).query(pts)
    inside = np.linalg.norm(np.linalg.solve(m.matrix, pts.T).T, axis=1) <= 1
    oracle[inside] = 0.0
    np.testing.assert_allclose(support_distances(pts, m), oracle, atol=1e-4)


def hausdorff_oracle(atoms, m, grid=600):
    g = np.linspace(-1, 1, grid)
    X, Z = np.meshgrid(g, g)
    P = np.column_stack([X.ravel(), Z.ravel()])
    local = np.linalg.solve(m.matrix, P.T).T
    P = P[(local**2).sum(axis=1) <= 1]
    P = np.vstack([P, np.column_stack([np.cos(a := np.linspace(0, 2 * np.pi, 8192)), np.sin(a)]) @ m.matrix.T])
    back, _ = cKDTree(atoms).query(P)
    return max(back.max(), support_distances(atoms, m).max())


def test_hausdorff_examples():
    half = ArchTimeT(0.5)
    single = EmpiricalMeasure2D([[0.0, 0.0]], [1.0])
    assert support_hausdorff(single, half) == pytest.approx(1.0, abs=1e-9)
    rng = np.random.default_rng(6)
    coarse = support_hausdorff(EmpiricalMeasure2D.uniform(sample_arch(300, rng)), half)
    fine = support_hausdorff(EmpiricalMeasure2D.uniform(sample_arch(30_000, rng)), half)
    assert fine < coarse and fine < 0.1


@pytest.mark.parametrize("t", [0.3, 0.5, 0.7])
def test_hausdorff_matches_grid_oracle(t):
    m = ArchTimeT(t)
    emp = permutation_measure(sample_network(60, RandomSource(8)), t)
    # the grid oracle underestimates by at most its spacing
    got = support_hausdorff(emp, m)
    oracle = hausdorff_oracle(emp.atoms, m)
    assert oracle - 1e-9 <= got <= oracle + 2 / 600 * np.sqrt(2)
