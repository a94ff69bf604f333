"""Shared helpers for the test suite: seeded random generators for rules,
configurations and matrices."""

import random

import numpy as np

from linca import FiniteSupportConfig, IntegerGroup, LinearCA, finite_support


def random_matrix(rng: random.Random, rows: int, cols: int, p: int) -> np.ndarray:
    flat = [rng.randrange(p) for _ in range(rows * cols)]
    return np.array(flat, dtype=np.int64).reshape(rows, cols)


def random_ca(rng: random.Random, group, p: int, dim_v: int, memory) -> LinearCA:
    blocks = [random_matrix(rng, dim_v, dim_v, p) for _ in memory]
    return LinearCA(group, p, dim_v, tuple(memory), tuple(blocks))


def random_integer_ca(rng: random.Random, p: int, dim_v: int, span=1) -> LinearCA:
    memory = tuple(range(-span, span + 1))
    return random_ca(rng, IntegerGroup(), p, dim_v, memory)


def random_finite_support(
    rng: random.Random, group, p: int, dim_v: int, cells
) -> FiniteSupportConfig:
    values = {}
    for g in cells:
        values[g] = [rng.randrange(p) for _ in range(dim_v)]
    return finite_support(p, dim_v, values)
