"""Case 2 family (lambda = 0, mu != 0): the product of a round or hyperbolic base with a timeline."""

from __future__ import annotations

from typing import Optional, Tuple

from lbcv.families.base import SolitonFamily, is_zero
from lbcv.jets import ScalarField
from lbcv.models import SpaceParams, VectorField


class ProductFamily(SolitonFamily):
    """X = (2 mu z + a) E3 with gamma = 4 mu."""

    label = "2"
    requirement = "lambda = 0 and mu != 0"
    coefficient_count = 1

    def matches(self, params: SpaceParams) -> bool:
        return is_zero(params.lam) and not is_zero(params.mu)

    def gamma(self, params: SpaceParams) -> Optional[float]:
        return 4.0 * params.mu

    def fields(self, params: SpaceParams, a: Tuple[float, ...], gamma: float) -> VectorField:
        mu, shift = params.mu, a[0]
        return VectorField(
            ScalarField.zero(),
            ScalarField.zero(),
            ScalarField(lambda x, y, z: 2 * mu * z + shift, "X3"),
        )
