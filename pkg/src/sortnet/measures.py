"""Permutation-matrix measures and the Archimedean measures they approach.

Arch is the projection of uniform surface measure on the unit sphere onto the
disk, density 1/(2 pi sqrt(1 - x^2 - y^2)). Arch_t is the law of
(X, X cos(pi t) + Y sin(pi t)) for (X, Y) ~ Arch; its support is the image of
the unit disk under the linear map (x, w) -> (x, x cos + w sin).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.spatial import QhullError, Voronoi, cKDTree

from .errors import DataError, UsageError
from .network import SortingNetwork, permutation_at


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure2D:
    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if weights.size != atoms.shape[0]:
            raise DataError("one weight per atom required")
        if np.any(weights < 0):
            raise DataError("weights must be nonnegative")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise DataError(f"total mass {weights.sum()!r} is not 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points) -> "EmpiricalMeasure2D":
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        return cls(points, np.full(len(points), 1.0 / len(points)))

    def __len__(self):
        return self.atoms.shape[0]


@dataclass(frozen=True)
class ArchTimeT:
    t: float

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise UsageError(f"t = {self.t} outside [0, 1]")

    @property
    def cos(self) -> float:
        return float(np.cos(np.pi * self.t))

    @property
    def sin(self) -> float:
        # exact zero at the endpoints so the degenerate branch is taken
        return 0.0 if self.t in (0.0, 1.0) else float(np.sin(np.pi * self.t))

    @property
    def degenerate(self) -> bool:
        return self.sin == 0.0

    @property
    def matrix(self) -> np.ndarray:
        """Linear map taking (x, w) in the unit disk onto the support."""
        return np.array([[1.0, 0.0], [self.cos, self.sin]])


def arch_density(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r2 = x * x + y * y
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(r2 < 1.0, 1.0 / (2 * np.pi * np.sqrt(np.maximum(1.0 - r2, 1e-300))), 0.0)
    return out if out.ndim else float(out)


def _interval_overlap(a0, a1, b0, b1):
    return max(0.0, min(a1, b1) - max(a0, b0))


def arch_t_mass(m: ArchTimeT, rect) -> float:
    """Mass of Arch_t on the rectangle (x0, x1, z0, z1)."""
    x0, x1, z0, z1 = (float(v) for v in rect)
    if x1 <= x0 or z1 <= z0:
        return 0.0
    x0, x1 = max(x0, -1.0), min(x1, 1.0)
    if x1 <= x0:
        return 0.0
    c, s = m.cos, m.sin
    if m.degenerate:
        # all mass on z = c x with X uniform on [-1, 1]
        if c > 0:
            return _interval_overlap(x0, x1, z0, z1) / 2.0
        return _interval_overlap(x0, x1, -z1, -z0) / 2.0

    def strip(x):
        rho = np.sqrt(max(1.0 - x * x, 0.0))
        if rho == 0.0:
            return 0.0
        with np.errstate(over="ignore"):  # rho -> 0 at the rim; clipping handles it
            lo = np.clip((z0 - x * c) / (s * rho), -1.0, 1.0)
            hi = np.clip((z1 - x * c) / (s * rho), -1.0, 1.0)
        return (np.arcsin(hi) - np.arcsin(lo)) / (2 * np.pi)

    # kinks where the horizontal edges meet the ellipse boundary
    kinks = []
    for z in (z0, z1):
        if abs(z) < 1.0:
            root = s * np.sqrt(1.0 - z * z)
            kinks += [z * c + root, z * c - root]
    kinks = sorted(k for k in kinks if x0 + 1e-12 < k < x1 - 1e-12)
    edges = [x0, *kinks, x1]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(strip, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
    return total


def permutation_measure(net: SortingNetwork, t: float) -> EmpiricalMeasure2D:
    """Atoms (2i/n - 1, rescaled position of particle i at step floor(N t))."""
    if not 0.0 <= t <= 1.0:
        raise UsageError(f"t = {t} outside [0, 1]")
    n = net.n
    step = int(np.floor(t * net.N + 1e-12))
    x = 2.0 * np.arange(1, n + 1) / n - 1.0
    y = 2.0 * permutation_at(net, step) / n - 1.0
    return EmpiricalMeasure2D(np.column_stack([x, y]), np.full(n, 1.0 / n))


@lru_cache(maxsize=64)
def _cell_masses(t: float, G: int) -> np.ndarray:
    m = ArchTimeT(t)
    edges = np.linspace(-1.0, 1.0, G + 1)
    out = np.empty((G, G))
    for i in range(G):
        for j in range(G):
            out[i, j] = arch_t_mass(m, (edges[i], edges[i + 1], edges[j], edges[j + 1]))
    out.setflags(write=False)
    return out


def cell_masses(m: ArchTimeT, G: int) -> np.ndarray:
    """G x G array of Arch_t masses; entry [i, j] is x-cell i, z-cell j."""
    return _cell_masses(float(m.t), int(G))


def empirical_cell_masses(emp: EmpiricalMeasure2D, G: int) -> np.ndarray:
    edges = np.linspace(-1.0, 1.0, G + 1)
    pts = np.clip(emp.atoms, -1.0, 1.0)
    hist, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=[edges, edges], weights=emp.weights)
    return hist


def grid_discrepancy(emp: EmpiricalMeasure2D, m: ArchTimeT, G: int = 10) -> float:
    """max over the G x G cells of [-1, 1]^2 of |empirical mass - Arch_t mass|."""
    if G < 2:
        raise UsageError(f"grid resolution must be at least 2, got {G}")
    return float(np.max(np.abs(empirical_cell_masses(emp, G) - cell_masses(m, G))))


# --- support distances ----------------------------------------------------------


def _distance_to_ellipse(p: float, q: float, a: float, b: float, tol: float = 1e-10) -> float:
    """Distance from (p, q) to the filled axis-aligned ellipse with semi-axes a >= b > 0.

    Outside points project onto the boundary at
    (a^2 p / (lam + a^2), b^2 q / (lam + b^2)) where lam > 0 is the root of a
    convex decreasing function; Newton from lam = 0 converges monotonically.
    """
    p, q = abs(p), abs(q)
    if (p / a) ** 2 + (q / b) ** 2 <= 1.0:
        return 0.0
    lam = 0.0
    for _ in range(200):
        u = a * p / (lam + a * a)
        v = b * q / (lam + b * b)
        f = u * u + v * v - 1.0
        df = -2.0 * (u * u / (lam + a * a) + v * v / (lam + b * b))
        step = f / df
        lam -= step
        if abs(step) <= tol * max(1.0, lam):
            break
    x = a * a * p / (lam + a * a)
    y = b * b * q / (lam + b * b)
    return float(np.hypot(p - x, q - y))


def _distance_to_segment(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = B - A
    u = np.clip(((P - A) @ d) / (d @ d), 0.0, 1.0)
    return np.linalg.norm(P - (A + u[:, None] * d), axis=1)


def support_distances(points, m: ArchTimeT) -> np.ndarray:
    """Distance from each point to the support of Arch_t (zero inside)."""
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    if m.degenerate:
        c = m.cos
        return _distance_to_segment(P, np.array([-1.0, -c]), np.array([1.0, c]))
    U, S, Vt = np.linalg.svd(m.matrix)
    local = P @ U  # coordinates along the principal axes
    return np.array([_distance_to_ellipse(p, q, S[0], S[1]) for p, q in local])


def _inside_support(P: np.ndarray, m: ArchTimeT) -> np.ndarray:
    if m.degenerate:
        return np.zeros(len(P), dtype=bool)
    local = np.linalg.solve(m.matrix, P.T).T
    return (local**2).sum(axis=1) <= 1.0


def support_points(m: ArchTimeT, boundary: int = 4096) -> np.ndarray:
    """``boundary`` equally spaced (in angle) points on the edge of the support."""
    ang = np.linspace(0.0, 2 * np.pi, boundary, endpoint=False)
    return np.column_stack([np.cos(ang), np.sin(ang)]) @ m.matrix.T


def support_hausdorff(emp: EmpiricalMeasure2D, m: ArchTimeT, boundary: int = 4096) -> float:
    """Two-sided Hausdorff distance between the atoms and the support of Arch_t.

    Atom-to-support distances are exact. For the reverse direction the
    distance to the nearest atom peaks either at a Voronoi vertex inside the
    support (exact) or on the support boundary (sampled at ``boundary``
    points).
    """
    atoms = emp.atoms[emp.weights > 0]
    forward = float(support_distances(atoms, m).max())
    candidates = [support_points(m, boundary)]
    if len(atoms) >= 4 and not m.degenerate:
        try:
            V = Voronoi(atoms).vertices
            candidates.append(V[_inside_support(V, m)])
        except QhullError:
            pass
    dist, _ = cKDTree(atoms).query(np.vstack(candidates))
    return max(forward, float(dist.max()))


# --- direct samplers -------------------------------------------------------------


def sample_arch(size: int, rng: np.random.Generator) -> np.ndarray:
    """Points from Arch: radius with P(R <= r) = 1 - sqrt(1 - r^2), uniform angle."""
    v = rng.random(size)
    r = np.sqrt(1.0 - v * v)
    phi = rng.random(size) * 2 * np.pi
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def sample_arch_t(m: ArchTimeT, size: int, rng: np.random.Generator) -> np.ndarray:
    return sample_arch(size, rng) @ m.matrix.T
