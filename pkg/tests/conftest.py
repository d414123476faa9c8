import functools

import pytest

from sortnet.sampler import RandomSource, sample_network


@functools.lru_cache(maxsize=None)
def cached_network(n: int, rep: int, seed: int = 20240501):
    """Networks shared between test modules; sampling at n=1000 takes seconds."""
    return sample_network(n, RandomSource(seed, rep))


@pytest.fixture(scope="session")
def networks():
    def get(n, reps, seed=20240501):
        return [cached_network(n, r, seed) for r in range(reps)]

    return get
