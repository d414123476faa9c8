"""Exactly uniform random sorting networks.

A uniform standard tableau of staircase shape (n-1, ..., 1) is drawn with the
hook walk and turned into a network by the inverse Edelman-Greene map
(promotion). Both steps are exact; the only randomness is in the integer walk
choices.

Reading convention: round ``i`` of promotion finds the corner holding the
current maximum; its 1-based row is recorded as swap ``k_i`` (so the
sequence fills from k_1 forward). All four candidate conventions (row or n-row,
forward or backward) produce valid networks and a bijection, because the set
of networks is closed under reversal and reflection. The forward one is used
because the first L rounds then give the first L swaps, which lets
``sample_swap_prefix`` stop early.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np

from . import _kernels
from .errors import DataError, UsageError
from .network import SortingNetwork, n_swaps


@dataclass(frozen=True)
class RandomSource:
    """A reproducible random stream: (seed, stream) fixes every draw.

    Streams are Philox keys derived through ``SeedSequence`` spawn keys, so
    different replicate indices give independent streams by construction.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def kernel_state(self) -> np.ndarray:
        """Four 64-bit words seeding the compiled xoshiro256** generator."""
        state = self.generator().integers(0, 2**64, size=4, dtype=np.uint64)
        if not state.any():
            state[0] = 1
        return state

    def child(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, self.stream * 1_000_003 + index + 1)


def _as_source(rng) -> RandomSource:
    if isinstance(rng, RandomSource):
        return rng
    if rng is None:
        return RandomSource(np.random.SeedSequence().entropy % 2**63)
    return RandomSource(int(rng))


@dataclass(frozen=True, eq=False)
class StaircaseTableau:
    """Standard Young tableau of shape (n-1, n-2, ..., 1).

    ``cells`` is an (n-1) x (n-1) integer array; row ``r`` (0-based) uses the
    first ``n-1-r`` columns and the rest is zero.
    """

    n: int
    cells: np.ndarray

    def __post_init__(self):
        n = self.n
        if n < 2:
            raise DataError(f"staircase tableau needs n >= 2, got {n}")
        m = n - 1
        cells = np.asarray(self.cells)
        if cells.shape != (m, m):
            raise DataError(f"expected a {m}x{m} array, got shape {cells.shape}")
        r, c = np.indices((m, m))
        inside = r + c < m
        values = cells[inside]
        if np.any(cells[~inside] != 0):
            raise DataError("non-zero entry outside the staircase shape")
        if not np.array_equal(np.sort(values), np.arange(1, n_swaps(n) + 1)):
            raise DataError("entries must be exactly 1..N")
        if m > 1:
            row_ok = (cells[:, 1:] > cells[:, :-1]) | ~inside[:, 1:]
            col_ok = (cells[1:, :] > cells[:-1, :]) | ~inside[1:, :]
            if not (row_ok.all() and col_ok.all()):
                raise DataError("rows and columns must strictly increase")
        cells = np.array(cells, dtype=np.int32)
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @cached_property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        m = self.n - 1
        return tuple(tuple(int(v) for v in self.cells[r, : m - r]) for r in range(m))

    def __eq__(self, other):
        if not isinstance(other, StaircaseTableau):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.n, self.cells.tobytes()))


def sample_staircase_tableau(n: int, rng=None) -> StaircaseTableau:
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    state = _as_source(rng).kernel_state()
    return StaircaseTableau(n, _kernels.hook_walk(n, state))


def tableau_to_network(T: StaircaseTableau) -> SortingNetwork:
    """Inverse Edelman-Greene map by repeated delete-max-and-slide."""
    if not isinstance(T, StaircaseTableau):
        raise DataError("expected a StaircaseTableau")
    return SortingNetwork(T.n, _kernels.promote(T.cells, T.n, n_swaps(T.n)))


def sample_network(n: int, rng=None) -> SortingNetwork:
    """Uniformly random sorting network on ``n`` particles."""
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    state = _as_source(rng).kernel_state()
    T = _kernels.hook_walk(n, state)
    return SortingNetwork(n, _kernels.promote(T, n, n_swaps(n)))


def sample_networks(n: int, reps: int, seed: int) -> Iterator[SortingNetwork]:
    """Replicates ``RandomSource(seed, i)`` for i in range(reps)."""
    for i in range(reps):
        yield sample_network(n, RandomSource(seed, i))


@dataclass(frozen=True, eq=False)
class SwapPrefix:
    """The first ``len(swaps)`` swaps of a sorting network on ``n`` particles."""

    n: int
    swaps: np.ndarray

    @property
    def N(self) -> int:
        return n_swaps(self.n)


def sample_swap_prefix(n: int, length: int, rng=None) -> SwapPrefix:
    """First ``length`` swaps of a uniform network, with their exact joint law.

    Only ``length`` promotion rounds are run, which is what makes local
    statistics at n in the thousands affordable.
    """
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    if not 0 <= length <= n_swaps(n):
        raise UsageError(f"prefix length {length} outside [0, {n_swaps(n)}]")
    state = _as_source(rng).kernel_state()
    T = _kernels.hook_walk(n, state)
    swaps = _kernels.promote(T, n, int(length))
    swaps.setflags(write=False)
    return SwapPrefix(n, swaps)


def sample_swap_prefixes(n: int, length: int, reps: int, rng=None) -> np.ndarray:
    """(reps, length) array of independent prefixes drawn from one stream."""
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    if not 0 <= length <= n_swaps(n):
        raise UsageError(f"prefix length {length} outside [0, {n_swaps(n)}]")
    state = _as_source(rng).kernel_state()
    return _kernels.sample_prefixes(n, int(length), int(reps), state)


def first_swap_pmf(n: int, exact: bool = False):
    """P(K_1 = i) for i = 1..n-1 from the closed-form product formula.

    With ``exact=True`` a list of Fractions is returned.
    """
    if n < 2:
        raise UsageError(f"n must be at least 2, got {n}")
    N = n_swaps(n)

    def odd_over_even(j):
        # [3*5*...*(2j-1)] / [2*4*...*(2j-2)]; empty products are 1
        num = 1
        den = 1
        for q in range(2, j + 1):
            num *= 2 * q - 1
            den *= 2 * q - 2
        return Fraction(num, den)

    ratios = [odd_over_even(j) for j in range(n)]
    pmf = [ratios[i] * ratios[n - i] / N for i in range(1, n)]
    if exact:
        return pmf
    return np.array([float(p) for p in pmf])


# --- exhaustive enumeration (small n only) -----------------------------------


def enumerate_networks(n: int) -> list[tuple[int, ...]]:
    """All sorting networks on n particles by depth-first search."""
    N = n_swaps(n)
    out: list[tuple[int, ...]] = []
    perm = list(range(1, n + 1))
    word: list[int] = []

    def dfs():
        if len(word) == N:
            out.append(tuple(word))
            return
        for k in range(1, n):
            if perm[k - 1] < perm[k]:
                perm[k - 1], perm[k] = perm[k], perm[k - 1]
                word.append(k)
                dfs()
                word.pop()
                perm[k - 1], perm[k] = perm[k], perm[k - 1]

    dfs()
    return out


def enumerate_tableaux(n: int) -> list[StaircaseTableau]:
    """All standard staircase tableaux, filling 1..N into addable cells."""
    m = n - 1
    N = n_swaps(n)
    lengths = [0] * m
    cells = np.zeros((m, m), dtype=np.int32)
    out = []

    def fill(v):
        if v > N:
            out.append(StaircaseTableau(n, cells.copy()))
            return
        for r in range(m):
            c = lengths[r]
            if c < m - r and (r == 0 or lengths[r - 1] > c):
                cells[r, c] = v
                lengths[r] += 1
                fill(v + 1)
                lengths[r] -= 1
                cells[r, c] = 0

    fill(1)
    return out


def count_staircase_tableaux(n: int) -> int:
    """Hook-length formula for shape (n-1, ..., 1)."""
    from math import factorial

    m = n - 1
    hooks = 1
    for r in range(m):
        for c in range(m - r):
            arm = m - r - c - 1
            leg = m - c - r - 1
            hooks *= arm + leg + 1
    return factorial(n_swaps(n)) // hooks
