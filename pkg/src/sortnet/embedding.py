"""Permutahedron embedding and great-circle fits.

A permutation tau maps to (tau(1), ..., tau(n)), which lies on the sphere of
squared radius (n^3 - n)/12 about c = ((n+1)/2, ..., (n+1)/2) inside the
hyperplane where coordinates sum to n(n+1)/2. A great circle through the
identity and the reversal is C(t) = X cos(pi t) + W sin(pi t) + c with
X_i = i - (n+1)/2 and W orthogonal to X and to the all-ones vector, with the
same norm as X.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DataError, DegenerateInputError, UsageError
from .network import SortingNetwork, permutation_at


def sphere_radius2(n: int) -> float:
    return (n**3 - n) / 12.0


def embed_path(net: SortingNetwork, t: float) -> np.ndarray:
    """Permutation vector (sigma(1, s), ..., sigma(n, s)) at step s = floor(N t)."""
    if not 0.0 <= t <= 1.0:
        raise UsageError(f"t = {t} outside [0, 1]")
    return permutation_at(net, int(np.floor(t * net.N + 1e-12)))


@dataclass(frozen=True, eq=False)
class GreatCircle:
    n: int
    X: np.ndarray
    W: np.ndarray

    @property
    def c(self) -> np.ndarray:
        return np.full(self.n, (self.n + 1) / 2.0)

    def __call__(self, t: float) -> np.ndarray:
        return self.X * np.cos(np.pi * t) + self.W * np.sin(np.pi * t) + self.c

    def invariant_errors(self) -> dict[str, float]:
        """Violation of each invariant, scaled so the stated tolerance applies."""
        r2 = sphere_radius2(self.n)
        nx, nw = np.linalg.norm(self.X), np.linalg.norm(self.W)
        return {
            "sum_X": abs(float(self.X.sum())) / max(nx, 1.0),
            "sum_W": abs(float(self.W.sum())) / max(nw, 1.0),
            "dot_XW": abs(float(self.X @ self.W)) / (nx * nw),
            "norm_X": abs(nx * nx - r2) / r2,
            "norm_W": abs(nw * nw - r2) / r2,
        }

    def check(self) -> bool:
        e = self.invariant_errors()
        return (e["sum_X"] <= 1e-12 and e["sum_W"] <= 1e-9 and e["dot_XW"] <= 1e-9
                and e["norm_X"] <= 1e-12 and e["norm_W"] <= 1e-12)


def _midpoint_vectors(net: SortingNetwork) -> tuple[np.ndarray, np.ndarray]:
    n = net.n
    X = np.arange(1, n + 1) - (n + 1) / 2.0
    V = permutation_at(net, net.N // 2) - (n + 1) / 2.0
    return X, V


def _rescale(Z: np.ndarray, n: int) -> np.ndarray:
    Z = Z - Z.mean()
    return Z * np.sqrt(sphere_radius2(n) / (Z @ Z))


def _projected(X, V):
    # V sums to zero already (a centred permutation), so only X needs removing
    return V - (V @ X) / (X @ X) * X


def _perturbed(X, V):
    """Spread a mirror-antisymmetric correction over the outer quarters.

    Lowers V_i and raises V_{n+1-i} by the same amount for every
    i >= 3(n+1)/4, with the amount chosen so the result is orthogonal to X.
    """
    n = X.size
    outer = np.arange(1, n + 1) >= 3 * (n + 1) / 4.0
    K = np.zeros(n)
    K[outer] = -1.0
    K[::-1][outer] = 1.0
    slope = X @ K
    return V - (V @ X) / slope * K


def fit_great_circle(net: SortingNetwork, method: str = "projection") -> GreatCircle:
    """Great circle through the identity and the reversal near the mid-time point.

    ``method="projection"`` takes W as the component of V orthogonal to X.
    ``method="perturbation"`` adjusts only the outer quarters of V instead.
    Either way W is then rescaled onto the sphere.
    """
    n = net.n
    if n < 3:
        raise UsageError("a great circle needs n >= 3; for n = 2 the sphere is two points")
    X, V = _midpoint_vectors(net)
    if method == "projection":
        Z = _projected(X, V)
    elif method == "perturbation":
        Z = _perturbed(X, V)
    else:
        raise UsageError(f"unknown method {method!r}")
    if np.linalg.norm(Z) <= 1e-9 * np.linalg.norm(X):
        raise DegenerateInputError(
            f"mid-time vector is parallel to the identity direction for {net.to_text()[:200]}")
    return GreatCircle(n, X, _rescale(Z, n))


def projection_residual(net: SortingNetwork, circ: GreatCircle) -> float:
    """||V - W||_2 / n^(3/2)."""
    _, V = _midpoint_vectors(net)
    return float(np.linalg.norm(V - circ.W) / net.n**1.5)


def circle_distance(net: SortingNetwork, circ: GreatCircle) -> float:
    """max over steps s of ||embed_path(s/N) - C(s/N)||_inf, divided by n."""
    if circ.n != net.n:
        raise DataError(f"circle is for n={circ.n}, network has n={net.n}")
    steps, moves = net.events
    d = _kernels.circle_sup_distance(steps, moves, net.n, net.N,
                                     np.ascontiguousarray(circ.X, dtype=float),
                                     np.ascontiguousarray(circ.W, dtype=float),
                                     (net.n + 1) / 2.0)
    return float(d / net.n)
