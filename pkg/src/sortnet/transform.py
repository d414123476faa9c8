"""Extended survival functions, size biasing and the ratio transform.

For a measure nu on (0, inf), S(x, q) = nu(x, inf) + (1 - q) nu({x}) runs
continuously from 1 to 0 as (x, q) increases lexicographically. The
size-biased measure has d nu_hat / d nu (x) = x / mean, and the ratio function
is r(y) = S(S_hat^{-1}(y)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DataError, UsageError


@dataclass(frozen=True, eq=False)
class DiscreteMeasure1D:
    locations: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        x = np.array(self.locations, dtype=float).ravel()
        p = np.array(self.probs, dtype=float).ravel()
        if x.size == 0 or x.size != p.size:
            raise DataError("need one probability per location")
        if np.any(x <= 0):
            raise DataError("locations must be positive")
        if np.any(np.diff(x) <= 0):
            raise DataError("locations must be strictly increasing")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DataError("probabilities must be nonnegative and sum to 1")
        x.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "locations", x)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_dict(cls, atoms: dict) -> "DiscreteMeasure1D":
        items = sorted((float(k), float(v)) for k, v in atoms.items())
        return cls([k for k, _ in items], [v for _, v in items])

    @property
    def mean(self) -> float:
        return float(self.locations @ self.probs)

    def moment(self, k: int) -> float:
        return float(self.locations**k @ self.probs)

    def tails(self) -> np.ndarray:
        """nu(x_i, inf) for each atom."""
        return np.concatenate((np.cumsum(self.probs[::-1])[::-1][1:], [0.0]))


def survival_ext(nu: DiscreteMeasure1D, x: float, q: float) -> float:
    if not 0.0 <= q <= 1.0:
        raise UsageError(f"q = {q} outside [0, 1]")
    above = float(nu.probs[nu.locations > x].sum())
    at = float(nu.probs[nu.locations == x].sum())
    return above + (1.0 - q) * at


def size_bias(nu: DiscreteMeasure1D) -> DiscreteMeasure1D:
    w = nu.probs * nu.locations
    return DiscreteMeasure1D(nu.locations, w / w.sum())


class ArcsinePlus:
    """|Y| for Y arcsine on [-pi, pi]: density 2/(pi sqrt(pi^2 - x^2)) on (0, pi)."""

    mean = 2.0

    @staticmethod
    def pdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where((x > 0) & (x < np.pi), 2.0 / (np.pi * np.sqrt(np.pi**2 - x * x)), 0.0)

    @staticmethod
    def survival(x):
        return 1.0 - (2.0 / np.pi) * np.arcsin(np.clip(np.asarray(x, dtype=float) / np.pi, 0.0, 1.0))

    @staticmethod
    def biased_survival(x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, np.pi)
        return np.sqrt(np.pi**2 - x * x) / np.pi

    @staticmethod
    def ratio(y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        return 1.0 - (2.0 / np.pi) * np.arcsin(np.sqrt(1.0 - y * y))


def ratio_fn(nu, x):
    """r_nu(x) = S(S_hat^{-1}(x)) for x in [0, 1].

    For a discrete measure S_hat^{-1} sweeps each atom linearly in q, so r is
    the piecewise-linear interpolant through the cumulative upper tails
    (nu_hat tail, nu tail) taken atom by atom from the top.
    """
    xs = np.asarray(x, dtype=float)
    if np.any((xs < 0) | (xs > 1)):
        raise UsageError("ratio function is defined on [0, 1]")
    if nu is ArcsinePlus or isinstance(nu, ArcsinePlus):
        out = ArcsinePlus.ratio(xs)
    elif isinstance(nu, DiscreteMeasure1D):
        nh = size_bias(nu)
        knots_hat = np.concatenate(([0.0], np.cumsum(nh.probs[::-1])))
        knots = np.concatenate(([0.0], np.cumsum(nu.probs[::-1])))
        knots_hat[-1] = knots[-1] = 1.0
        out = np.interp(xs, knots_hat, knots)
    else:
        raise DataError("expected a DiscreteMeasure1D or ArcsinePlus")
    return out if out.ndim else float(out)


def transform_H(r, k: float, tol: float = 1e-10) -> float:
    """H(r)(k) = integral over [0, k] of r(sqrt(1 - k^2) / sqrt(1 - x^2)) dx."""
    if not 0.0 <= k <= 1.0:
        raise UsageError(f"k = {k} outside [0, 1]")
    if k == 0.0:
        return 0.0
    ck = np.sqrt(1.0 - k * k)

    def f(x):
        return float(r(min(ck / np.sqrt(max(1.0 - x * x, 1e-300)), 1.0)))

    val, _ = integrate.quad(f, 0.0, k, epsabs=tol, epsrel=1e-12, limit=400)
    return float(val)


def identity_residual(k: float) -> float:
    """|1 - k + H(r_arc+)(k) - sqrt(1 - k^2)|."""
    return abs(1.0 - k + transform_H(ArcsinePlus.ratio, k) - np.sqrt(max(1.0 - k * k, 0.0)))
