"""Case 3 family (lambda = mu = 0): affine solitons of Minkowski space, any gamma."""

from __future__ import annotations

from typing import Optional, Tuple

from lbcv.families.base import SolitonFamily, is_zero
from lbcv.jets import ScalarField
from lbcv.models import SpaceParams, VectorField


class MinkowskiFamily(SolitonFamily):
    """Dilation by gamma/2 plus a Killing field (rotation, two boosts, translations)."""

    label = "3"
    requirement = "lambda = 0 and mu = 0"
    coefficient_count = 6
    free_gamma = True

    def matches(self, params: SpaceParams) -> bool:
        return is_zero(params.lam) and is_zero(params.mu)

    def gamma(self, params: SpaceParams) -> Optional[float]:
        return None

    def fields(self, params: SpaceParams, a: Tuple[float, ...], gamma: float) -> VectorField:
        a1, a2, a3, a4, a5, a6 = a
        s = 0.5 * gamma
        return VectorField(
            ScalarField(lambda x, y, z: s * x - a1 * y + a2 * z + a3, "X1"),
            ScalarField(lambda x, y, z: a1 * x + s * y + a4 * z + a5, "X2"),
            ScalarField(lambda x, y, z: a2 * x + a4 * y + s * z + a6, "X3"),
        )
