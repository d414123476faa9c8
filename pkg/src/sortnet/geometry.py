"""Geometric sorting networks and random subnetworks.

Points in the plane, labelled by increasing x, are ordered by their projection
onto the direction (cos phi, sin phi). As phi runs over [0, pi] every pair
changes order exactly once, at the angle perpendicular to the segment joining
them, and the sequence of adjacent exchanges is a sorting network.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateInputError, UsageError
from .measures import sample_arch
from .network import SortingNetwork, restrict

_TOL = 1e-12


def _flip_angles(pts: np.ndarray):
    i, j = np.triu_indices(len(pts), k=1)
    d = pts[j] - pts[i]
    # dx > 0 after sorting, so the angle lands in (0, pi)
    return i, j, np.arctan2(d[:, 1], d[:, 0]) + np.pi / 2


@dataclass(frozen=True, eq=False)
class PointConfig:
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if len(pts) < 2:
            raise DataError("need at least two points")
        if np.any(np.hypot(pts[:, 0], pts[:, 1]) > 1.0 + _TOL):
            raise DataError("points must lie in the closed unit disk")
        pts = pts[np.argsort(pts[:, 0], kind="stable")]
        if np.any(np.diff(pts[:, 0]) <= _TOL):
            raise DegenerateInputError("two points share an x-coordinate")
        _, _, phi = _flip_angles(pts)
        if len(phi) > 1 and np.any(np.diff(np.sort(phi)) <= _TOL):
            raise DegenerateInputError("two pairs determine parallel lines")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return len(self.points)


def geometric_network(cfg: PointConfig) -> SortingNetwork:
    """Record the adjacent exchanges as the projection direction turns by pi."""
    m = cfg.m
    i, j, phi = _flip_angles(cfg.points)
    order = np.argsort(phi, kind="stable")
    pos = list(range(m))  # pos[label] = current 0-based position
    swaps = []
    for e in order:
        a, b = int(i[e]), int(j[e])
        lower = min(pos[a], pos[b])
        if abs(pos[a] - pos[b]) != 1:
            raise AssertionError(f"flipping pair ({a + 1}, {b + 1}) is not adjacent")
        swaps.append(lower + 1)
        pos[a], pos[b] = pos[b], pos[a]
    return SortingNetwork(m, swaps)


def sample_arch_config(m: int, rng: np.random.Generator) -> PointConfig:
    """m independent Arch points; degenerate draws (probability zero) are redrawn."""
    while True:
        try:
            return PointConfig(sample_arch(m, rng))
        except DegenerateInputError:
            continue


def sample_subnetwork(net: SortingNetwork, m: int, rng: np.random.Generator) -> SortingNetwork:
    """Restriction of ``net`` to a uniformly random m-subset of particles."""
    if not 2 <= m <= net.n:
        raise UsageError(f"need 2 <= m <= {net.n}, got {m}")
    subset = rng.choice(net.n, size=m, replace=False) + 1
    return restrict(net, subset)


def pattern_distribution(samples) -> dict[tuple[int, ...], float]:
    """Empirical pmf of whole-network patterns keyed by swap sequence."""
    counts: Counter = Counter()
    m = None
    total = 0
    for s in samples:
        key = s.as_tuple() if isinstance(s, SortingNetwork) else tuple(int(k) for k in s)
        size = s.n if isinstance(s, SortingNetwork) else None
        if size is None:
            size = int(round((1 + np.sqrt(1 + 8 * len(key))) / 2))
        if m is None:
            m = size
        elif size != m:
            raise DataError(f"mixed sizes {m} and {size}")
        counts[key] += 1
        total += 1
    if total == 0:
        raise DataError("no samples")
    return {k: v / total for k, v in sorted(counts.items())}


def tv_distance(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * float(sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys))


def subnetwork_patterns(nets, m: int, per_network: int, rng: np.random.Generator):
    """Patterns of ``per_network`` random m-subsets from each network."""
    for net in nets:
        for _ in range(per_network):
            yield sample_subnetwork(net, m, rng).as_tuple()


def geometric_patterns(m: int, count: int, rng: np.random.Generator):
    for _ in range(count):
        yield geometric_network(sample_arch_config(m, rng)).as_tuple()

