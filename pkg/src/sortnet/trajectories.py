"""Sine fits, maximum heights, the octagon envelope and localization spans.

Trajectories are constant between swaps, so every sup-norm here is taken over
the full step grid {0, 1/N, ..., 1}; the compiled kernels do this exactly per
constant stretch rather than by sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _kernels
from .errors import UsageError
from .network import SortingNetwork, Trajectory


@dataclass(frozen=True)
class SinePath:
    amplitude: float
    phase: float

    def __post_init__(self):
        if not 0.0 <= self.amplitude <= 1.0:
            raise UsageError(f"amplitude {self.amplitude} outside [0, 1]")
        object.__setattr__(self, "phase", float(self.phase) % (2 * np.pi))

    def __call__(self, t):
        return self.amplitude * np.sin(np.pi * np.asarray(t) + self.phase)


def _grid_values(traj) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(traj, Trajectory):
        return traj.times, traj.values
    times, values = (np.asarray(a, dtype=float) for a in traj)
    return times, values


def _anchors(times, values):
    half = np.searchsorted(times, 0.5 + 1e-12, side="right") - 1
    return values[0], values[half]


def _refine(times, values, path: SinePath) -> tuple[SinePath, float]:
    # sup-norm is not smooth; Nelder-Mead from the anchored fit is enough here
    def cost(p):
        a = min(max(p[0], 0.0), 1.0)
        return np.max(np.abs(values - a * np.sin(np.pi * times + p[1])))

    res = optimize.minimize(cost, [path.amplitude, path.phase], method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    start = cost([path.amplitude, path.phase])
    if res.fun < start:
        return SinePath(min(max(res.x[0], 0.0), 1.0), res.x[1]), float(res.fun)
    return path, float(start)


def sine_fit(traj, refine: bool = False) -> tuple[SinePath, float]:
    """Anchored fit A sin(pi t + theta) through the values at t = 0 and t = 1/2.

    ``traj`` is a Trajectory or a pair (times, values) on a grid containing 0.
    With ``refine=True`` the sup deviation is further reduced by a local
    search over (A, theta).
    """
    times, values = _grid_values(traj)
    x0, y0 = _anchors(times, values)
    path = SinePath(min(float(np.hypot(x0, y0)), 1.0), float(np.arctan2(x0, y0)))
    if refine:
        return _refine(times, values, path)
    if isinstance(traj, Trajectory):
        dev = _kernels.segment_sup_deviation(traj.jump_steps, traj.levels, traj.N,
                                             path.amplitude, path.phase, 2.0 / traj.n, -1.0)
    else:
        dev = np.max(np.abs(values - path(times)))
    return path, float(dev)


def _half(net: SortingNetwork) -> int:
    return net.N // 2


def sine_deviations(net: SortingNetwork) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(amplitude, phase, deviation) of the anchored fit for every particle."""
    steps, moves = net.events
    return _kernels.all_sine_deviations(steps, moves, net.n, net.N, _half(net))


def max_sine_deviation(net: SortingNetwork) -> float:
    return float(sine_deviations(net)[2].max())


def max_height(traj) -> float:
    """max over the step grid of |traj|."""
    if isinstance(traj, Trajectory):
        return float(np.max(np.abs(2.0 * traj.levels / traj.n - 1.0)))
    return float(np.max(np.abs(_grid_values(traj)[1])))


def max_heights(net: SortingNetwork) -> np.ndarray:
    steps, moves = net.events
    return _kernels.max_abs_levels(steps, moves, net.n)


def octagon_check(net: SortingNetwork, gamma: float) -> bool:
    """True when every trajectory stays inside the octagon envelope widened by gamma."""
    if gamma <= 0:
        raise UsageError(f"gamma must be positive, got {gamma}")
    steps, moves = net.events
    return bool(_kernels.octagon_ok(steps, moves, net.n, net.N, float(gamma)))


def localization_spans(net: SortingNetwork, max_arc: float = 2e-3) -> np.ndarray:
    """Per-particle diameter of t -> exp(i pi t) (g(t) + i g(t + 1/2)), t in [0, 1/2]."""
    steps, moves = net.events
    return _kernels.localization_diameters(steps, moves, net.n, net.N, _half(net), float(max_arc))


def localization_span(net: SortingNetwork, max_arc: float = 2e-3) -> float:
    return float(localization_spans(net, max_arc).max())
