"""Local windows of a sorting network around a position, and their statistics.

Around position i the process is shifted by i and time is rescaled by
r = sqrt(1 - (2i/n - 1)^2): local time s corresponds to step n s / r. In these
units the swap rate at a bond is 4/pi per unit time, particles swap at rate
8/pi, and particle speeds follow the arcsine law on [-pi, pi].

A window keeps the swaps on bonds touching local positions -w..w, including
the two bonds that connect the window to the outside. Replaying them keeps
track of which particle sits where; particles entering from outside are only
known by the side they came from.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import HorizonError, UsageError, WindowExitError
from .network import n_swaps
from .sampler import RandomSource, sample_swap_prefix

BELOW = -(10**9)  # label of a particle that entered from below the window
ABOVE = 10**9


def scale_factor(n: int, i: int) -> float:
    return float(np.sqrt(1.0 - (2.0 * i / n - 1.0) ** 2))


def default_width(T: float) -> int:
    # speeds are bounded by pi, so a particle moves at most about pi T
    return int(np.ceil(np.pi * T)) + 4


@dataclass(frozen=True, eq=False)
class LocalWindow:
    n: int
    i: int
    w: int
    T: float
    r: float
    steps: int
    times: np.ndarray  # rescaled times of the kept swaps, non-decreasing
    bonds: np.ndarray  # local bond b: swap of local positions b and b+1

    @property
    def lo(self) -> int:
        return max(1, self.i - self.w) - self.i

    @property
    def hi(self) -> int:
        return min(self.n, self.i + self.w) - self.i

    @property
    def events(self) -> np.ndarray:
        """(time, local position) of swaps inside the window, position in [-w, w)."""
        inside = (self.bonds >= self.lo) & (self.bonds < self.hi)
        return np.column_stack([self.times[inside], self.bonds[inside]])


def local_window(source, i: int, w: int | None = None, T: float = 1.0) -> LocalWindow:
    """Window of half-width w around position i over local times [0, T].

    ``source`` is a SortingNetwork or a SwapPrefix; the horizon n T / r steps
    must be available in it.
    """
    n = source.n
    if not 1 <= i <= n - 1:
        raise UsageError(f"center {i} outside [1, {n - 1}]")
    if T < 0:
        raise UsageError("horizon must be nonnegative")
    w = default_width(T) if w is None else int(w)
    if w < 1:
        raise UsageError("half-width must be at least 1")
    r = scale_factor(n, i)
    steps = int(np.floor(n * T / r + 1e-9))
    if steps > n_swaps(n):
        raise HorizonError(f"horizon needs {steps} steps but the network has {n_swaps(n)}")
    if steps > len(source.swaps):
        raise HorizonError(f"horizon needs {steps} steps but only {len(source.swaps)} are available")
    k = np.asarray(source.swaps[:steps], dtype=np.int64)
    keep = (k >= i - w - 1) & (k <= i + w)
    idx = np.nonzero(keep)[0]
    times = (idx + 1) * r / n
    return LocalWindow(n, i, w, float(T), r, steps, times, (k[idx] - i).astype(np.int64))


def _replay(win: LocalWindow, t: float, track=None) -> tuple[np.ndarray, list, int]:
    """State at local time t.

    Returns (labels, exits, swaps of ``track``). ``exits`` lists
    (label, side, later_entries_on_that_side) for each particle that left.
    """
    if t > win.T + 1e-12:
        raise HorizonError(f"t = {t} beyond window horizon {win.T}")
    lo, hi = win.lo, win.hi
    labels = np.arange(lo, hi + 1, dtype=np.int64)
    exits = []  # [label, side, entries seen so far on that side]
    entries = {1: 0, -1: 0}
    tracked_swaps = 0
    stop = np.searchsorted(win.times, t + 1e-12, side="right")
    for b in win.bonds[:stop]:
        if lo <= b < hi:
            j = b - lo
            a, c = labels[j], labels[j + 1]
            if track is not None and (a == track or c == track):
                tracked_swaps += 1
            labels[j], labels[j + 1] = c, a
        elif b == hi:
            # top particle leaves, one enters from above
            out = labels[-1]
            if track is not None and out == track:
                tracked_swaps += 1
            exits.append([out, 1, entries[1]])
            entries[1] += 1
            labels[-1] = ABOVE
        elif b == lo - 1:
            out = labels[0]
            if track is not None and out == track:
                tracked_swaps += 1
            exits.append([out, -1, entries[-1]])
            entries[-1] += 1
            labels[0] = BELOW
    for e in exits:
        e[2] = entries[e[1]] - e[2] - 1  # entries on that side after this exit
    return labels, exits, tracked_swaps


def count_W(win: LocalWindow, t: float) -> int:
    """Swaps between local positions 0 and 1 up to local time t."""
    if t > win.T + 1e-12:
        raise HorizonError(f"t = {t} beyond window horizon {win.T}")
    stop = np.searchsorted(win.times, t + 1e-12, side="right")
    return int(np.count_nonzero(win.bonds[:stop] == 0))


def count_Q(win: LocalWindow, t: float) -> int:
    """Swaps made by the particle starting at local position 0 up to time t."""
    labels, exits, q = _replay(win, t, track=0)
    if any(lab == 0 for lab, _, _ in exits):
        raise WindowExitError("tracked particle left the window")
    return q


def displacement(win: LocalWindow, t: float) -> int:
    labels, exits, _ = _replay(win, t)
    if any(lab == 0 for lab, _, _ in exits):
        raise WindowExitError("tracked particle left the window")
    return int(np.nonzero(labels == 0)[0][0] + win.lo)


def count_crossings(win: LocalWindow, c: float, d: float, t: float) -> tuple[int, int]:
    """(C+, C-) for the line L(s) = c s + d in local units.

    C+ counts particles with V(x, 0) <= L(0) and V(x, t) > L(t); C- the
    reverse. Raises WindowExitError if the answer depends on a particle whose
    identity was lost at the window edge.
    """
    lo, hi = win.lo, win.hi
    L0, Lt = d, c * t + d
    labels, exits, _ = _replay(win, t)
    clipped_below = win.i - win.w < 1
    clipped_above = win.i + win.w > win.n
    for L in (L0, Lt):
        if not ((L >= lo - 1 or clipped_below) and (L <= hi or clipped_above)):
            raise UsageError(f"line value {L} outside the window [{lo}, {hi}]")

    def starts_below(lab):
        return lab == BELOW or (lab != ABOVE and lab <= L0)

    pos = np.arange(lo, hi + 1)
    up = sum(1 for p, lab in zip(pos, labels) if p > Lt and starts_below(lab))
    down = sum(1 for p, lab in zip(pos, labels) if p <= Lt and not starts_below(lab))
    for lab, side, later in exits:
        below = starts_below(lab)
        if side == 1 and below:
            if later:
                raise WindowExitError("a particle from below left the top and the top was re-entered")
            up += 1
        elif side == -1 and not below:
            if later:
                raise WindowExitError("a particle from above left the bottom and the bottom was re-entered")
            down += 1
    return up, down


def _widened(fn, source, i: int, T: float):
    """fn(window) on the default window, doubling the width until nothing exits.

    A wider window replays the same swaps, so the answer is exact rather than
    discarded.
    """
    w = default_width(T)
    while True:
        win = local_window(source, i, w, T)
        try:
            return fn(win)
        except WindowExitError:
            if w >= source.n:
                raise
            w *= 2


def estimate_speed(source, i: int, T: float, w: int | None = None) -> float:
    """Local displacement of the particle starting at i over time T, divided by T.

    Without ``w`` the window is widened as needed; with an explicit ``w`` an exit
    raises WindowExitError.
    """
    if T <= 0:
        raise UsageError("horizon must be positive")
    if w is None:
        return _widened(lambda win: displacement(win, T), source, i, T) / T
    return displacement(local_window(source, i, w, T), T) / T


def estimate_speeds(source, i, T: float, w: int | None = None) -> np.ndarray:
    """Speeds for one or several centers in the same network; exits give nan with a warning."""
    centers = np.atleast_1d(i)
    out = np.empty(centers.size)
    for j, c in enumerate(centers):
        try:
            out[j] = estimate_speed(source, int(c), T, w)
        except WindowExitError:
            warnings.warn(f"particle at {c} left its window; sample discarded", RuntimeWarning)
            out[j] = np.nan
    return out


def swap_counts(source, steps: int) -> np.ndarray:
    """Number of swaps each particle makes in the first ``steps`` swaps."""
    k = np.asarray(source.swaps[:steps], dtype=np.int64)
    n = source.n
    at = np.arange(1, n + 1)
    counts = np.zeros(n + 1, dtype=np.int64)
    for kk in k:
        a, b = at[kk - 1], at[kk]
        counts[a] += 1
        counts[b] += 1
        at[kk - 1], at[kk] = b, a
    return counts[1:]


# --- batch estimators used by the CLI and the acceptance checks ---------------------------


def separated_centers(n: int, count: int, gap: int, rng: np.random.Generator,
                      lo: float = 0.1, hi: float = 0.9) -> np.ndarray:
    """Up to ``count`` uniform centers in [lo n, hi n], pairwise at least ``gap`` apart."""
    a, b = int(np.ceil(lo * n)), int(np.floor(hi * n))
    chosen: list[int] = []
    for _ in range(50 * count):
        if len(chosen) == count:
            break
        c = int(rng.integers(a, b + 1))
        if all(abs(c - x) >= gap for x in chosen):
            chosen.append(c)
    return np.array(chosen, dtype=np.int64)


def center_rate(n: int, t: float, seed: int, rep: int) -> tuple[int, int]:
    """(W, Q) at the middle position over local time t for replicate ``rep``."""
    i = n // 2
    steps = int(np.floor(n * t / scale_factor(n, i) + 1e-9))
    prefix = sample_swap_prefix(n, steps, RandomSource(seed, rep))
    win = local_window(prefix, i, None, t)
    return count_W(win, t), _widened(lambda win: count_Q(win, t), prefix, i, t)


def center_rates(n: int, t: float, reps: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    W, Q = np.array([center_rate(n, t, seed, rep) for rep in range(reps)], dtype=np.int64).reshape(-1, 2).T
    return W, Q


def network_speeds(n: int, T: float, seed: int, rep: int, per_network: int) -> tuple[np.ndarray, np.ndarray]:
    """(centers, speeds) for ``per_network`` random centers whose default windows are disjoint."""
    src = RandomSource(seed, rep)
    centers = separated_centers(n, per_network, 2 * default_width(T) + 2, src.child(0).generator())
    steps = max(int(np.floor(n * T / scale_factor(n, int(c)) + 1e-9)) for c in centers)
    prefix = sample_swap_prefix(n, steps, src)
    return centers, estimate_speeds(prefix, centers, T)


def pooled_speeds(n: int, T: float, networks: int, per_network: int, seed: int) -> np.ndarray:
    """Speeds at ``per_network`` random centers in each of ``networks`` networks."""
    return np.concatenate([network_speeds(n, T, seed, rep, per_network)[1] for rep in range(networks)])
