import math

import numpy as np
import pytest

from hecke_density.core import Branch, SatakeTuple, from_free_angles
from hecke_density.density import sieve

TWO_PI = 2.0 * math.pi


def bulk_angles(rng: np.random.Generator, n: int, g: int) -> np.ndarray:
    """(n, g+1) angle matrix of valid random tuples; independent of the sim
    module so it can serve as a neutral test fixture."""
    free = rng.uniform(0.0, TWO_PI, size=(n, g))
    branch = rng.integers(0, 2, size=n)
    theta0 = (-free.sum(axis=1) / 2.0 + branch * math.pi) % TWO_PI
    return np.column_stack([theta0, free])


def random_tuple(rng: np.random.Generator, g: int) -> SatakeTuple:
    branch = Branch.PLUS if rng.integers(0, 2) == 0 else Branch.MINUS
    return from_free_angles(g, rng.uniform(0.0, TWO_PI, size=g), branch)


@pytest.fixture(scope="session")
def table_1e4():
    return sieve(10**4)


@pytest.fixture(scope="session")
def table_1e5():
    return sieve(10**5)


@pytest.fixture(scope="session")
def table_1e6():
    return sieve(10**6)
