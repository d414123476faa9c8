"""Sorting networks, particle positions and rescaled trajectories.

A sorting network on ``n`` particles is a swap sequence ``(k_1, ..., k_N)``,
``N = n(n-1)/2``, where swap ``k`` exchanges the particles at positions ``k``
and ``k + 1`` and the whole sequence takes the identity to the reversal.
Particles are labelled by their initial (1-based) position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DataError, UsageError


def n_swaps(n: int) -> int:
    return n * (n - 1) // 2


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    reason: str | None = None  # "length", "range" or "composition"
    index: int | None = None  # 0-based offending entry, when there is one

    def __bool__(self) -> bool:
        return self.valid


def validate_network(candidate: Sequence[int], n: int) -> ValidationReport:
    """Check that ``candidate`` is a sorting network on ``n`` particles.

    Failures are reported, never raised. Conditions are checked in the order
    length, range, composition. A composition failure points at the first swap
    that acts on a pair that is already reversed; with the right length, a word
    with no such swap always composes to the reversal.
    """
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    swaps = np.asarray(candidate, dtype=np.int64).ravel()
    if swaps.size != n_swaps(n):
        return ValidationReport(False, "length", None)
    code, index = _kernels.check_word(swaps, n)
    if code == 1:
        return ValidationReport(False, "range", int(index))
    if code == 2:
        return ValidationReport(False, "composition", int(index))
    return ValidationReport(True)


class SortingNetwork:
    """Immutable sorting network. Construction validates the swap sequence."""

    def __init__(self, n: int, swaps: Iterable[int], *, check: bool = True):
        n = int(n)
        if n < 2:
            raise DataError(f"a sorting network needs n >= 2, got {n}")
        arr = np.array(swaps, dtype=np.int32).ravel()
        if check:
            report = validate_network(arr, n)
            if not report:
                raise DataError(f"not a sorting network on {n} particles: {report}")
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "swaps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SortingNetwork is immutable")

    @property
    def N(self) -> int:
        return self.swaps.size

    def __len__(self) -> int:
        return self.swaps.size

    def __eq__(self, other):
        if not isinstance(other, SortingNetwork):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.swaps, other.swaps)

    def __hash__(self):
        return hash((self.n, self.swaps.tobytes()))

    def __repr__(self):
        if self.N <= 12:
            return f"SortingNetwork(n={self.n}, swaps={tuple(int(k) for k in self.swaps)})"
        return f"SortingNetwork(n={self.n}, N={self.N})"

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(k) for k in self.swaps)

    @cached_property
    def events(self) -> tuple[np.ndarray, np.ndarray]:
        """(steps, moves): per-particle jump steps and signs, shape (n, n-1)."""
        steps, moves = _kernels.swap_events(self.swaps, self.n)
        steps.setflags(write=False)
        moves.setflags(write=False)
        return steps, moves

    @cached_property
    def pair_times(self) -> np.ndarray:
        """times[a-1, b-1] = step at which particles a and b swap."""
        times = _kernels.pair_swap_times(self.swaps, self.n)
        times.setflags(write=False)
        return times

    # serialization

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "swaps": [int(k) for k in self.swaps]})

    @classmethod
    def from_json(cls, text: str) -> "SortingNetwork":
        data = json.loads(text)
        try:
            return cls(data["n"], data["swaps"])
        except KeyError as exc:
            raise DataError(f"missing field {exc} in network JSON") from None

    def to_text(self) -> str:
        return " ".join([str(self.n)] + [str(int(k)) for k in self.swaps])

    @classmethod
    def from_text(cls, line: str) -> "SortingNetwork":
        fields = line.split()
        if not fields:
            raise DataError("empty network line")
        try:
            values = [int(f) for f in fields]
        except ValueError:
            raise DataError(f"non-integer field in network line: {line[:60]!r}") from None
        return cls(values[0], values[1:])


def bubble_sort_network(n: int) -> SortingNetwork:
    """The network (1, 2, ..., n-1, 1, 2, ..., n-2, ..., 1, 2, 1)."""
    swaps = [k for top in range(n - 1, 0, -1) for k in range(1, top + 1)]
    return SortingNetwork(n, swaps)


def permutation_at(net: SortingNetwork, t: int) -> np.ndarray:
    """Positions of particles 1..n after ``t`` swaps (entry x-1 is particle x)."""
    if not 0 <= t <= net.N:
        raise UsageError(f"time {t} outside [0, {net.N}]")
    return _kernels.positions_at(net.swaps, net.n, int(t))


def position(net: SortingNetwork, x: int, t: int) -> int:
    """sigma(x, t): position of particle ``x`` after the first ``t`` swaps."""
    if not 1 <= x <= net.n:
        raise UsageError(f"particle {x} outside [1, {net.n}]")
    return int(permutation_at(net, t)[x - 1])


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Rescaled path 2*sigma(x, N t)/n - 1 of one particle.

    Stored compactly: the path is constant between the ``n - 1`` steps at which
    the particle swaps. ``levels[k]`` is the integer position held on the k-th
    constant stretch. ``times``/``values`` expand to the full step grid.
    """

    n: int
    jump_steps: np.ndarray
    levels: np.ndarray

    @property
    def N(self) -> int:
        return n_swaps(self.n)

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.N + 1) / self.N

    @property
    def positions(self) -> np.ndarray:
        idx = np.searchsorted(self.jump_steps, np.arange(self.N + 1), side="right")
        return self.levels[idx]

    @property
    def values(self) -> np.ndarray:
        return 2.0 * self.positions / self.n - 1.0

    def position_at_step(self, s: int) -> int:
        return int(self.levels[np.searchsorted(self.jump_steps, s, side="right")])

    def at_step(self, s: int) -> float:
        return 2.0 * self.position_at_step(s) / self.n - 1.0

    def __call__(self, t: float) -> float:
        """Value at time t in [0, 1], right-continuous (step floor(N t))."""
        return self.at_step(int(np.floor(t * self.N + 1e-12)))

    @property
    def start(self) -> float:
        return 2.0 * self.levels[0] / self.n - 1.0

    @property
    def end(self) -> float:
        return 2.0 * self.levels[-1] / self.n - 1.0


def global_trajectory(net: SortingNetwork, x: int) -> Trajectory:
    if not 1 <= x <= net.n:
        raise UsageError(f"particle {x} outside [1, {net.n}]")
    steps, moves = net.events
    levels = np.concatenate(([x], x + np.cumsum(moves[x - 1], dtype=np.int64)))
    return Trajectory(net.n, steps[x - 1], levels)


def restrict(net: SortingNetwork, subset: Iterable[int]) -> SortingNetwork:
    """The network traced by the relative order of the particles in ``subset``.

    Every pair of particles swaps exactly once, so the restriction is the
    members' pair-swaps replayed in time order. The emitted position is the
    rank of the lower member among the subset at that moment.
    """
    members = sorted(set(int(a) for a in subset))
    if len(members) < 2:
        raise UsageError("restriction needs at least two particles")
    if members[0] < 1 or members[-1] > net.n:
        raise UsageError(f"subset must lie in [1, {net.n}]")
    idx = np.asarray(members) - 1
    times = net.pair_times[np.ix_(idx, idx)]
    iu, ju = np.triu_indices(len(members), k=1)
    order = np.argsort(times[iu, ju], kind="stable")
    rank = list(range(len(members)))  # rank[j] = current relative position of member j
    swaps = []
    for e in order:
        a, b = iu[e], ju[e]
        lower = min(rank[a], rank[b])
        swaps.append(lower + 1)
        rank[a], rank[b] = rank[b], rank[a]
    return SortingNetwork(len(members), swaps)
