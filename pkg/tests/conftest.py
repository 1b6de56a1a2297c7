import numpy as np
import pytest

from frecl import (
    CurveSet,
    FunctionalDataset,
    NoiseSpec,
    SimSpec,
    TimeGrid,
    generate,
    parametric_beta,
)


@pytest.fixture
def grid24():
    return TimeGrid.regular(1.0, 24.0, 24)


@pytest.fixture
def rng():
    return np.random.default_rng(123)


@pytest.fixture
def small_dataset(rng):
    """Unstructured dataset: 9 observations, 2 predictors, 16 time points."""
    grid = TimeGrid.regular(0.0, 10.0, 16)
    response = CurveSet(grid, rng.standard_normal((9, 16)))
    predictors = tuple(CurveSet(grid, rng.standard_normal((9, 16))) for _ in range(2))
    return FunctionalDataset(response, predictors, None)


@pytest.fixture
def separable_sim(grid24):
    """Noise-free 2-cluster benchmark with well separated operators."""
    beta = parametric_beta(grid24, 2, 2)
    spec = SimSpec(
        m=80, grid=grid24, beta=beta, noise=NoiseSpec("iid", 0.0), harmonics=2, seed=42
    )
    return generate(spec)
