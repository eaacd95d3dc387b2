"""Shared fixtures for the lbcv test suite."""

from typing import Callable

import numpy as np
import pytest

from lbcv.jets import ScalarField, cos, sin
from lbcv.models import FrameGrid, RunConfig, SpaceParams, VectorField
from lbcv.solitons import default_grid

RESIDUAL_TOL = 1e-9


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def grid() -> FrameGrid:
    """The 5 x 5 x 5 default grid on [-0.9, 0.9]^3."""
    return default_grid(RunConfig())


def random_scalar(rng: np.random.Generator, name: str = "f") -> ScalarField:
    """A polynomial-plus-trig field with seeded coefficients."""
    c = rng.uniform(-1.0, 1.0, 9)
    w = rng.uniform(-2.0, 2.0, 2)

    def expr(x, y, z):
        return (
            c[0]
            + c[1] * x
            + c[2] * y
            + c[3] * z
            + c[4] * x * y
            + c[5] * z * z
            + c[6] * x * x * y
            + c[7] * sin(w[0] * z + x)
            + c[8] * y * cos(w[1] * z)
        )

    return ScalarField(expr, name)


def random_field(rng: np.random.Generator) -> VectorField:
    return VectorField(*(random_scalar(rng, f"X{i}") for i in (1, 2, 3)))


@pytest.fixture
def field_factory(rng: np.random.Generator) -> Callable[[], VectorField]:
    """Draws a fresh random vector field on every call."""
    return lambda: random_field(rng)


def random_params(rng: np.random.Generator, mu_low: float = -0.5, mu_high: float = 2.0) -> SpaceParams:
    """lambda in [-2, 2], mu in [mu_low, mu_high]; the default grid stays inside D."""
    return SpaceParams(float(rng.uniform(-2.0, 2.0)), float(rng.uniform(mu_low, mu_high)))
