import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from sortnet.network import SortingNetwork, bubble_sort_network, global_trajectory
from sortnet.sampler import RandomSource, sample_network
from sortnet.trajectories import (
    SinePath,
    localization_span,
    localization_spans,
    max_height,
    max_heights,
    max_sine_deviation,
    octagon_check,
    sine_deviations,
    sine_fit,
)

GRID = np.linspace(0.0, 1.0, 401)


def test_fit_exact_sines():
    path, dev = sine_fit((GRID, np.sin(np.pi * GRID)))
    assert path.amplitude == pytest.approx(1.0) and path.phase == pytest.approx(0.0)
    assert dev < 1e-12
    path, dev = sine_fit((GRID, np.zeros_like(GRID)))
    assert path.amplitude == 0.0 and dev == 0.0
    path, dev = sine_fit((GRID, 0.5 * np.cos(np.pi * GRID)))
    assert path.amplitude == pytest.approx(0.5) and path.phase == pytest.approx(np.pi / 2)
    assert dev < 1e-12


@given(st.floats(0, 1), st.floats(0, 2 * np.pi, exclude_max=True))
def test_fit_recovers_any_sine(a, theta):
    path, dev = sine_fit((GRID, a * np.sin(np.pi * GRID + theta)))
    assert dev < 1e-9
    assert path.amplitude == pytest.approx(a, abs=1e-12)


def test_sine_path_evaluates():
    p = SinePath(0.3, 1.0)
    assert np.all(np.abs(p(GRID)) <= 0.3)


def grid_deviation(net, x):
    tr = global_trajectory(net, x)
    t, v = tr.times, tr.values
    half = net.N // 2
    a = min(np.hypot(v[0], v[half]), 1.0)
    th = np.arctan2(v[0], v[half])
    return np.max(np.abs(v - a * np.sin(np.pi * t + th)))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32))
def test_deviation_matches_grid_oracle(n, seed):
    net = sample_network(n, RandomSource(seed))
    _, _, dev = sine_deviations(net)
    oracle = [grid_deviation(net, x) for x in range(1, n + 1)]
    np.testing.assert_allclose(dev, oracle, atol=1e-12)
    for x in (1, n):
        assert sine_fit(global_trajectory(net, x))[1] == pytest.approx(oracle[x - 1], abs=1e-12)


def test_n2_deviation():
    dev = max_sine_deviation(SortingNetwork(2, [1]))
    assert 0 < dev <= 1


def test_refine_never_worse():
    net = sample_network(30, RandomSource(2))
    tr = global_trajectory(net, 7)
    assert sine_fit(tr, refine=True)[1] <= sine_fit(tr)[1] + 1e-12


def test_bubble_sort_far_from_sines():
    assert max_sine_deviation(bubble_sort_network(300)) > 0.5


def test_max_height():
    net = sample_network(20, RandomSource(5))
    h = max_heights(net)
    for x in range(1, 21):
        tr = global_trajectory(net, x)
        assert h[x - 1] == max_height(tr) == np.max(np.abs(tr.values))
        assert h[x - 1] >= abs(tr.start) and h[x - 1] >= abs(tr.end)
    assert max_height(global_trajectory(net, 1)) >= abs(2 / 20 - 1)
    assert max_height((GRID, 0.3 * np.sin(np.pi * GRID))) == pytest.approx(0.3)


def octagon_oracle(net, gamma):
    t = np.arange(net.N + 1) / net.N
    for x in range(1, net.n + 1):
        v = global_trajectory(net, x).values
        if np.any(np.abs(v - v[0]) >= 2 * np.sqrt(2 * t - t * t) + gamma):
            return False
        if np.any(np.abs(v - v[-1]) >= 2 * np.sqrt(1 - t * t) + gamma):
            return False
    return True


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32), st.sampled_from([0.05, 0.2, 0.5]))
def test_octagon_matches_oracle(n, seed, gamma):
    net = sample_network(n, RandomSource(seed))
    assert octagon_check(net, gamma) == octagon_oracle(net, gamma)


def test_octagon_examples():
    assert octagon_check(sample_network(50, RandomSource(1)), 4.0)
    assert not octagon_check(bubble_sort_network(200), 0.1)
    passes = sum(octagon_check(sample_network(500, RandomSource(7, r)), 0.3) for r in range(100))
    assert passes >= 95


def span_oracle(net, x):
    v = global_trajectory(net, x).values
    half = net.N // 2
    s = np.arange(half + 1)
    z = np.exp(1j * np.pi * s / net.N) * (v[s] + 1j * v[s + half])
    pts = np.column_stack([z.real, z.imag])
    return pdist(pts).max() if len(pts) > 1 else 0.0


@settings(max_examples=15, deadline=None)
@given(st.integers(3, 40), st.integers(0, 2**32))
def test_span_matches_oracle(n, seed):
    net = sample_network(n, RandomSource(seed))
    spans = localization_spans(net)
    np.testing.assert_allclose(spans, [span_oracle(net, x) for x in range(1, n + 1)], atol=1e-12)


def test_span_zero_for_exact_sine():
    # the rotated curve of an exact sine is constant
    N = 1000
    t = np.arange(N + 1) / N
    g = 0.7 * np.sin(np.pi * t + 0.4)
    s = np.arange(N // 2 + 1)
    z = np.exp(1j * np.pi * t[s]) * (g[s] + 1j * g[s + N // 2])
    assert np.ptp(z.real) < 1e-12 and np.ptp(z.imag) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(5, 200), st.integers(0, 2**32))
def test_span_bounded_by_deviation(n, seed):
    net = sample_network(n, RandomSource(seed))
    assert localization_span(net) <= 2 * max_sine_deviation(net)


@pytest.mark.slow
def test_span_trend(networks):
    small = np.median([localization_span(net) for net in networks(100, 20)])
    large = np.median([localization_span(net) for net in networks(500, 20)])
    assert large < small
