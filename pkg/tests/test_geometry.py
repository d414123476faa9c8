import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sortnet import DataError, DegenerateInputError, UsageError
from sortnet.geometry import (
    PointConfig,
    geometric_network,
    geometric_patterns,
    pattern_distribution,
    sample_arch_config,
    sample_subnetwork,
    subnetwork_patterns,
    tv_distance,
)
from sortnet.network import SortingNetwork, validate_network
from sortnet.sampler import RandomSource, sample_network


def brute_force_network(pts):
    """Order of projections on a fine sweep of angles, read off as adjacent swaps."""
    pts = pts[np.argsort(pts[:, 0])]
    m = len(pts)
    i, j = np.triu_indices(m, 1)
    d = pts[j] - pts[i]
    flips = np.sort(np.arctan2(d[:, 1], d[:, 0]) + np.pi / 2)
    # sample the order strictly between consecutive flip angles
    mids = np.concatenate([[0.0], (flips[:-1] + flips[1:]) / 2, [np.pi]])
    orders = [tuple(np.argsort(pts @ [np.cos(a), np.sin(a)])) for a in mids]
    swaps = []
    for a, b in zip(orders, orders[1:]):
        diff = [p for p in range(m) if a[p] != b[p]]
        assert len(diff) == 2 and diff[1] == diff[0] + 1
        swaps.append(diff[0] + 1)
    return swaps


def test_two_points():
    cfg = PointConfig([[0.5, 0.2], [-0.3, 0.4]])
    assert geometric_network(cfg).as_tuple() == (1,)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(2, 9))
def test_matches_angle_sweep(seed, m):
    cfg = sample_arch_config(m, np.random.default_rng(seed))
    net = geometric_network(cfg)
    assert validate_network(net.swaps, m)
    assert list(net.swaps) == brute_force_network(np.array(cfg.points))


def test_degenerate_configs():
    with pytest.raises(DegenerateInputError):
        PointConfig([[0.1, 0.0], [0.1, 0.5]])
    with pytest.raises(DegenerateInputError):
        # the two pairs (1,2) and (3,4) are parallel
        PointConfig([[-0.5, 0.0], [-0.2, 0.1], [0.2, -0.3], [0.5, -0.2]])
    with pytest.raises(DataError):
        PointConfig([[0.0, 0.0], [0.9, 0.9]])


def test_small_rotation_invariance():
    rng = np.random.default_rng(11)
    for _ in range(50):
        cfg = sample_arch_config(6, rng)
        pts = np.array(cfg.points) * 0.99
        i, j = np.triu_indices(6, 1)
        d = pts[j] - pts[i]
        flips = np.arctan2(d[:, 1], d[:, 0]) + np.pi / 2
        # rotate by less than the gap between any flip angle and the ends of (0, pi)
        eps = 0.25 * min(flips.min(), np.pi - flips.max(), np.diff(np.sort(pts[:, 0])).min())
        c, s = np.cos(eps), np.sin(eps)
        rotated = pts @ np.array([[c, s], [-s, c]])
        assert geometric_network(PointConfig(rotated)) == geometric_network(PointConfig(pts))


def test_three_point_frequencies():
    rng = np.random.default_rng(3)
    p = pattern_distribution(geometric_patterns(3, 100_000, rng))
    assert set(p) == {(1, 2, 1), (2, 1, 2)}
    assert abs(p[(1, 2, 1)] - 0.5) < 0.01


def test_subnetwork_basics():
    net = sample_network(12, RandomSource(5, 0))
    rng = np.random.default_rng(0)
    assert sample_subnetwork(net, 12, rng) == net
    for _ in range(20):
        assert sample_subnetwork(net, 2, rng).as_tuple() == (1,)
    with pytest.raises(UsageError):
        sample_subnetwork(net, 13, rng)


def test_subnetwork_fuzz():
    nets = [sample_network(100, RandomSource(6, r)) for r in range(10)]
    rng = np.random.default_rng(1)
    for key in subnetwork_patterns(nets, 7, 10_000, rng):
        assert validate_network(key, 7)


def test_pattern_distribution_and_tv():
    p = pattern_distribution([(1, 2, 1), (2, 1, 2), (1, 2, 1), SortingNetwork(3, [1, 2, 1])])
    assert p == {(1, 2, 1): 0.75, (2, 1, 2): 0.25}
    assert tv_distance(p, p) == 0.0
    assert tv_distance(p, {(2, 1, 2): 1.0}) == pytest.approx(0.75)
    with pytest.raises(DataError):
        pattern_distribution([(1, 2, 1), (1,)])
    with pytest.raises(DataError):
        pattern_distribution([])
