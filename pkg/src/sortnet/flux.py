"""Arcsine speed law, the particle-flux functional and its minimizers.

For a path h: [0, 1] -> [-1, 1] with local speed s = h' / sqrt(1 - h^2) the
flux is J(h) = 1/2 * integral of D(s(t)) sqrt(1 - h(t)^2) dt, where D(c) is the
mean absolute deviation from c of the arcsine law on [-pi, pi]. Paths with
h(0) = -h(1) have J >= 1, with equality along the sine arcs k sin(pi t + phi).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, UsageError

PI = np.pi
_GX, _GW = np.polynomial.legendre.leggauss(32)
TAU = (_GX + 1.0) / 2.0  # nodes on [0, 1]
WT = _GW / 2.0
# the same rule after t = 3u^2 - 2u^3, which flattens square-root endpoint
# behaviour (D near |s| = pi) into something Gauss integrates accurately
_SMOOTH_TAU = 3 * TAU**2 - 2 * TAU**3
_SMOOTH_WT = WT * 6 * TAU * (1 - TAU)


# --- the arcsine speed law ---------------------------------------------------------


class ArcsineSpeedLaw:
    """Density 1/(pi sqrt(pi^2 - x^2)) on [-pi, pi]."""

    lo, hi = -PI, PI

    @staticmethod
    def pdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(np.abs(x) < PI, 1.0 / (PI * np.sqrt(PI * PI - x * x)), 0.0)

    @staticmethod
    def cdf(x):
        return 0.5 + np.arcsin(np.clip(np.asarray(x, dtype=float) / PI, -1.0, 1.0)) / PI

    @staticmethod
    def ppf(u):
        return PI * np.sin(PI * (np.asarray(u, dtype=float) - 0.5))

    mean_abs = 2.0


def d_mu(c):
    """E|Y - c| for Y arcsine on [-pi, pi]; |c| outside the support."""
    c = np.asarray(c, dtype=float)
    inside = np.abs(c) <= PI
    u = np.clip(c / PI, -1.0, 1.0)
    # written so that D(0) = 2 and D(+-pi) = pi hold exactly in floating point
    val = np.where(inside, c * (np.arcsin(u) / (PI / 2)) + 2.0 * np.sqrt(np.maximum(1.0 - u * u, 0.0)),
                   np.abs(c))
    return val if val.ndim else float(val)


def d_mu_plus(c):
    """E(Y - c)^+ = (D(c) - c) / 2."""
    return (d_mu(c) - np.asarray(c, dtype=float)) / 2.0 if np.ndim(c) else (d_mu(c) - c) / 2.0


def d_mu_minus(c):
    """E(Y - c)^- = (D(c) + c) / 2."""
    return (d_mu(c) + np.asarray(c, dtype=float)) / 2.0 if np.ndim(c) else (d_mu(c) + c) / 2.0


def d_mu_prime(c):
    c = np.asarray(c, dtype=float)
    val = np.where(np.abs(c) <= PI, np.arcsin(np.clip(c / PI, -1.0, 1.0)) / (PI / 2), np.sign(c))
    return val if val.ndim else float(val)


# --- paths -------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FluxPath:
    """Piecewise-linear path through (j/M, values[j]), j = 0..M."""

    values: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size < 2:
            raise DataError("a path needs at least two grid values")
        if self.check:
            if np.any(np.abs(v) > 1.0 + 1e-12):
                raise DataError("path values must lie in [-1, 1]")
            M = v.size - 1
            if np.any(np.abs(np.diff(v)) > PI / M * (1 + 1e-9) + 1e-12):
                raise DataError("path exceeds the pi-Lipschitz cap")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size - 1

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.M + 1)

    def __call__(self, t):
        return np.interp(t, self.times, self.values)

    @classmethod
    def from_function(cls, f, M: int, check: bool = True) -> "FluxPath":
        return cls(f(np.linspace(0.0, 1.0, M + 1)), check=check)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "h"])
        for t, h in zip(self.times, self.values):
            w.writerow([repr(float(t)), repr(float(h))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FluxPath":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["t", "h"]:
            raise DataError("path CSV must start with the header t,h")
        try:
            data = np.array([[float(a), float(b)] for a, b in rows[1:] if (a, b)], dtype=float)
        except ValueError:
            raise DataError("non-numeric entry in path CSV") from None
        if data.shape[0] < 2:
            raise DataError("path CSV needs at least two rows")
        grid = np.linspace(0.0, 1.0, data.shape[0])
        if not np.allclose(data[:, 0], grid, atol=1e-9):
            raise DataError("path CSV times must be the uniform grid j/M")
        return cls(data[:, 1])


# --- the functional ----------------------------------------------------------------


def _integrand(hv, p):
    """(g, dg/dh, dg/dp) for g = D(p / sqrt(1-h^2)) sqrt(1-h^2); zero where |h| = 1."""
    rt = np.sqrt(np.maximum(1.0 - hv * hv, 0.0))
    ok = rt > 0
    safe = np.where(ok, rt, 1.0)
    s = np.where(ok, p / safe, 0.0)
    Ds = d_mu(s)
    Dps = d_mu_prime(s)
    g = np.where(ok, Ds * rt, 0.0)
    dgdh = np.where(ok, hv / safe * (s * Dps - Ds), 0.0)
    dgdp = np.where(ok, Dps, 0.0)
    return g, dgdh, dgdp


def _speed_breaks(h0, dv, M):
    """Fractions in (0, 1) of each linear piece where |s| = pi, nan if none.

    D'' blows up there, so Gauss rules converge slowly across these points.
    On a piece with slope p, |s| >= pi exactly when |h| >= sqrt(1 - (p/pi)^2).
    """
    p = dv * M
    hc = np.sqrt(np.maximum(1.0 - (p / PI) ** 2, 0.0))
    out = []
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        for target in (hc, -hc):
            tau = (target - h0) / dv
            out.append(np.where((dv != 0) & (np.abs(p) < PI) & (tau > 0) & (tau < 1), tau, np.nan))
    return out


def flux(h: FluxPath, a: float = 0.0, b: float = 1.0) -> float:
    """J(h; [a, b]) by 32-point Gauss-Legendre on every linear piece.

    Pieces are further split where the local speed crosses +-pi.
    """
    if not 0.0 <= a < b <= 1.0:
        raise UsageError(f"need 0 <= a < b <= 1, got [{a}, {b}]")
    v = h.values
    M = h.M
    j0 = min(int(np.floor(a * M)), M - 1)
    j1 = max(int(np.ceil(b * M)), j0 + 1)
    j = np.arange(j0, j1)
    lo = np.clip(a * M - j, 0.0, 1.0)  # local fractions of [j/M, (j+1)/M]
    hi = np.clip(b * M - j, 0.0, 1.0)
    keep = hi > lo
    j, lo, hi = j[keep], lo[keep], hi[keep]
    h0 = v[j]
    dv = v[j + 1] - v[j]
    cuts = [np.clip(np.nan_to_num(c, nan=hi), lo, hi) for c in _speed_breaks(h0, dv, M)]
    edges = np.sort(np.column_stack([lo, *cuts, hi]), axis=1)
    total = 0.0
    for k in range(edges.shape[1] - 1):
        e0, e1 = edges[:, k], edges[:, k + 1]
        tau = e0[:, None] + (e1 - e0)[:, None] * _SMOOTH_TAU
        g, _, _ = _integrand(h0[:, None] + dv[:, None] * tau, dv[:, None] * M)
        total += np.sum(g * _SMOOTH_WT * (e1 - e0)[:, None])
    return float(0.5 * total / M)


def flux_and_gradient(values: np.ndarray) -> tuple[float, np.ndarray]:
    """J over [0, 1] and its gradient in the grid values, for descent.

    Uses the plain 32-point rule per piece so value and gradient are exactly
    consistent; ``flux`` is the more accurate evaluator when |s| crosses pi.
    """
    v = np.asarray(values, dtype=float)
    M = v.size - 1
    h0 = v[:-1, None]
    dv = v[1:, None] - h0
    hv = h0 + dv * TAU
    g, dgdh, dgdp = _integrand(hv, dv * M)
    J = 0.5 * np.sum(g * WT) / M
    left = 0.5 * np.sum((dgdh * (1.0 - TAU) - dgdp * M) * WT, axis=1) / M
    right = 0.5 * np.sum((dgdh * TAU + dgdp * M) * WT, axis=1) / M
    grad = np.zeros(M + 1)
    grad[:-1] += left
    grad[1:] += right
    return float(J), grad


# --- minimal-flux sine arcs ---------------------------------------------------------


def minimal_flux_path(a: float, k: float, M: int) -> FluxPath:
    """|k| sin(pi t + phi) from a to -a, reaching +k (k > 0) or -|k| (k < 0)."""
    if abs(a) > abs(k) + 1e-15 or abs(k) > 1.0:
        raise UsageError(f"need |a| <= |k| <= 1, got a={a}, k={k}")
    if k == 0:
        return FluxPath(np.zeros(M + 1))
    phi = np.arcsin(np.clip(a / abs(k), -1.0, 1.0))
    if k < 0:
        phi = PI - phi
    t = np.linspace(0.0, 1.0, M + 1)
    return FluxPath(np.clip(abs(k) * np.sin(PI * t + phi), -1.0, 1.0))


def sine_family_distance(h: FluxPath, a: float, resolution: int = 2001) -> tuple[float, float]:
    """Smallest sup distance from h to the arcs from a to -a; returns (distance, k)."""
    t = h.times
    best, best_k = np.inf, np.nan
    for k in np.linspace(abs(a), 1.0, resolution):
        for sign in (1.0, -1.0):
            if k == 0:
                f = np.zeros_like(t)
            else:
                phi = np.arcsin(np.clip(a / k, -1.0, 1.0))
                if sign < 0:
                    phi = PI - phi
                f = k * np.sin(PI * t + phi)
            d = float(np.max(np.abs(h.values - f)))
            if d < best:
                best, best_k = d, sign * k
    return best, best_k


# --- constrained descent ------------------------------------------------------------


def project_lip_r(h: np.ndarray, a: float, iters: int = 200) -> np.ndarray:
    """Nearest path with h(0) = a, h(1) = -a, |h| <= 1 and steps at most pi/M.

    Dykstra's alternating projections over three convex sets: the box with the
    pinned ends, and the slope slabs on even and on odd neighbouring pairs
    (each of which is a product of independent two-variable projections).
    """
    x = np.array(h, dtype=float)
    M = x.size - 1
    L = PI / M

    def box(y):
        y = np.clip(y, -1.0, 1.0)
        y[0], y[-1] = a, -a
        return y

    def pairs(y, start):
        y = y.copy()
        i = np.arange(start, M, 2)
        d = y[i + 1] - y[i]
        corr = (d - np.clip(d, -L, L)) / 2.0
        y[i] += corr
        y[i + 1] -= corr
        return y

    ops = (box, lambda y: pairs(y, 0), lambda y: pairs(y, 1))
    incr = [np.zeros_like(x) for _ in ops]
    for _ in range(iters):
        prev = x
        for k, op in enumerate(ops):
            y = op(x + incr[k])
            incr[k] = x + incr[k] - y
            x = y
        if np.max(np.abs(x - prev)) < 1e-13:
            break
    return _repair(x, a, L)


def _repair(x: np.ndarray, a: float, L: float) -> np.ndarray:
    """Forward pass that makes an almost-feasible path exactly feasible.

    Each value is clipped to what is reachable from its predecessor and can
    still reach -a at the end, so only round-off sized changes are made.
    """
    M = x.size - 1
    j = np.arange(M + 1)
    lo = np.maximum.reduce([np.full(M + 1, -1.0), a - j * L, -a - (M - j) * L])
    hi = np.minimum.reduce([np.full(M + 1, 1.0), a + j * L, -a + (M - j) * L])
    out = np.empty_like(x)
    out[0] = a
    for i in range(1, M + 1):
        out[i] = min(max(x[i], lo[i], out[i - 1] - L), hi[i], out[i - 1] + L)
    out[-1] = -a
    return out


@dataclass(frozen=True)
class MinimizeResult:
    path: FluxPath
    value: float
    converged: bool
    iterations: int


def minimize_flux(a: float, M: int = 100, iterations: int = 5000, start=None,
                  rng: np.random.Generator | None = None, tol: float = 1e-14) -> MinimizeResult:
    """Projected gradient descent on J over paths from a to -a.

    ``start`` may be a FluxPath or array of M+1 values; by default a random
    zig-zag is used. The step grows by 1.5 after an accepted move and halves on
    rejection; descent stops once the accepted decrease falls below ``tol``.
    """
    if not abs(a) < 1.0:
        raise UsageError(f"need |a| < 1, got {a}")
    if start is None:
        rng = rng if rng is not None else np.random.default_rng()
        start = rng.uniform(-1.0, 1.0, M + 1)
    h = np.asarray(start.values if isinstance(start, FluxPath) else start, dtype=float)
    if h.size != M + 1:
        raise UsageError(f"start has {h.size} values, expected {M + 1}")
    h = project_lip_r(h, a)
    J, g = flux_and_gradient(h)
    step = 1.0
    converged = False
    it = 0
    for it in range(1, iterations + 1):
        direction = g * M
        while True:
            hn = project_lip_r(h - step * direction, a, 50)
            Jn, gn = flux_and_gradient(hn)
            if Jn < J - 1e-15 or step < 1e-12:
                break
            step *= 0.5
        if J - Jn < tol:
            converged = True
            break
        h, J, g = hn, Jn, gn
        step *= 1.5
    path = FluxPath(h)
    return MinimizeResult(path, flux(path), converged, it)


def minimize_flux_multistart(a: float, M: int, starts: int, seed: int,
                             iterations: int = 5000) -> list[MinimizeResult]:
    out = []
    for i in range(starts):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(i,))))
        out.append(minimize_flux(a, M, iterations, rng=rng))
    return out


# --- test-path generators and the shift surgery ---------------------------------------


def random_lip_r_path(M: int, rng: np.random.Generator) -> FluxPath:
    """A random pi-Lipschitz path in [-1, 1] with h(1) = -h(0).

    Half the draws are random walks with a random slope scale, so shapes range
    from flat to saturated zig-zags; the other half are minimal arcs with noise
    of random size, which probe the bound J >= 1 closely. Both are projected
    onto the constraint set.
    """
    if rng.random() < 0.5:
        a = rng.uniform(-1.0, 1.0)
        scale = rng.uniform(0.05, 1.5) * PI / M
        walk = a + np.concatenate(([0.0], np.cumsum(rng.uniform(-scale, scale, M))))
        # bend the walk so it ends near -a before projecting
        walk += np.linspace(0.0, 1.0, M + 1) * (-a - walk[-1])
        return FluxPath(project_lip_r(walk, a))
    a = rng.uniform(-1.0, 1.0)
    k = rng.uniform(abs(a), 1.0) * rng.choice([-1.0, 1.0])
    arc = minimal_flux_path(a, k, M).values
    noise = rng.normal(0.0, 10.0 ** rng.uniform(-6.0, -1.0), M + 1)
    return FluxPath(project_lip_r(arc + noise, a))


def shift_surgery(h: FluxPath, j0: int) -> FluxPath:
    """Rotate a zero at grid index j0 to time 0: h(t + t0), then -h(t + t0 - 1)."""
    v = h.values
    if not 0 <= j0 <= h.M:
        raise UsageError(f"grid index {j0} outside [0, {h.M}]")
    if abs(v[j0]) > 1e-12:
        raise UsageError(f"path is not zero at grid index {j0}")
    if abs(v[0] + v[-1]) > 1e-12:
        raise UsageError("surgery needs h(0) = -h(1)")
    return FluxPath(np.concatenate((v[j0:], -v[1 : j0 + 1])))
