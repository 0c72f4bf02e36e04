"""Shared fixtures: the scalar reference system and a pooled population of
random certified systems reused across the slower suites."""

import numpy as np
import pytest

import riccati_lab as rl

# (1+sqrt(5))/2: fixed point of p = p/(1+p) + 1
PHI = 1.6180339887498949


def pool_specs():
    # 210 certified systems, 35 per dimension, mixed spectral radii
    targets = [None, 0.6, 1.2]
    return [
        (dim, 1000 * dim + j, targets[j % 3])
        for dim in range(1, 7)
        for j in range(35)
    ]


@pytest.fixture(scope="session")
def golden():
    return rl.SystemTriple.from_arrays(np.eye(1), np.eye(1), np.eye(1))


@pytest.fixture(scope="session")
def golden_fp(golden):
    return rl.solve_fixed_point(golden)


@pytest.fixture(scope="session")
def system_pool():
    return [
        rl.random_system(dim, rng=seed, spectral_radius_target=target)
        for dim, seed, target in pool_specs()
    ]


@pytest.fixture(scope="session")
def pool_fps(system_pool):
    return [rl.solve_fixed_point(s) for s in system_pool]


@pytest.fixture
def rng():
    return np.random.default_rng(0)
