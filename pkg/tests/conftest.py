"""
Shared fixtures: seeded generators and small synthetic problems.
"""
import numpy as np
import pytest

from app.datasets import SplitSpec, split
from app.engine.solver import build_problem_linear
from app.generators import MixtureGenerator, make_rng


def correlated_data(seed: int, d: int = 4, n: int = 60, p: int = 2, q: int = 2):
    """Random X (d x n) with targets and sensitive attributes that depend on it linearly plus noise."""
    rng = make_rng(seed)
    X = rng.standard_normal((d, n))
    Y = rng.standard_normal((p, d)) @ X + 0.5 * rng.standard_normal((p, n))
    S = rng.standard_normal((q, d)) @ X + 0.5 * rng.standard_normal((q, n))
    return X, Y, S


@pytest.fixture
def rng():
    return make_rng(1234)


@pytest.fixture
def random_data():
    return correlated_data(seed=7)


@pytest.fixture
def linear_problem(random_data):
    X, Y, S = random_data
    return build_problem_linear(X, Y, S)


@pytest.fixture(scope="session")
def mixture():
    return MixtureGenerator.generate(1000, seed=3)


@pytest.fixture(scope="session")
def mixture_split():
    data = MixtureGenerator.generate(5000, seed=11)
    return split(data, SplitSpec(train_fraction=0.8, seed=11))


@pytest.fixture(scope="session")
def mixture_problem(mixture):
    return build_problem_linear(mixture.X, mixture.Y, mixture.S)


def orthonormal_columns(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    Q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return Q[:, :cols]
