"""Case 1 families (lambda != 0): the nontrivial bundle over the base surface."""

from __future__ import annotations

from typing import Literal, Optional, Tuple

from lbcv.families.base import SolitonFamily, is_zero
from lbcv.jets import ScalarField, cos, sin
from lbcv.models import SpaceParams, VectorField
from lbcv.solitons import obstruction_delta

# "printed_x3" uses a1 (x^2 - y^2) in X3 and "printed_x2" uses +1 in the a2
# term of X2, as typeset; both fail the residual oracle.
Case1bForm = Literal["corrected", "printed_x3", "printed_x2"]


class FlatBaseFamily(SolitonFamily):
    """mu = 0: shrinking solitons with gamma = 2 lambda^2."""

    label = "1a"
    requirement = "lambda != 0 and mu = 0"
    coefficient_count = 4

    def matches(self, params: SpaceParams) -> bool:
        return not is_zero(params.lam) and is_zero(params.mu)

    def gamma(self, params: SpaceParams) -> Optional[float]:
        return 2.0 * params.lam**2

    def fields(self, params: SpaceParams, a: Tuple[float, ...], gamma: float) -> VectorField:
        lam = params.lam
        a1, a2, a3, a4 = a[:4]
        q = 0.5 * lam**2
        return VectorField(
            ScalarField(lambda x, y, z: (2 * a1 * y + a3) / lam + q * x, "X1"),
            ScalarField(lambda x, y, z: -(2 * a1 * x + a2) / lam + q * y, "X2"),
            ScalarField(
                lambda x, y, z: lam**2 * z + a1 * (x * x + y * y) + a2 * x + a3 * y + a4,
                "X3",
            ),
        )


class BalancedFamily(SolitonFamily):
    """mu = -lambda^2 / 4: steady solitons (gamma = 0), all of them Killing fields."""

    label = "1b"
    requirement = "lambda != 0 and mu = -lambda^2/4"
    coefficient_count = 6

    def __init__(self, form: Case1bForm = "corrected"):
        if form not in ("corrected", "printed_x3", "printed_x2"):
            raise ValueError(f"Unknown Case 1b form: {form!r}")
        self.form = form

    def matches(self, params: SpaceParams) -> bool:
        if is_zero(params.lam) or is_zero(params.mu):
            return False
        return is_zero(obstruction_delta(params))

    def gamma(self, params: SpaceParams) -> Optional[float]:
        return 0.0

    def fields(self, params: SpaceParams, a: Tuple[float, ...], gamma: float) -> VectorField:
        lam, mu = params.lam, params.mu
        a1, a2, a3, a4, a5, a6 = a
        x3_sign = -1.0 if self.form == "printed_x3" else 1.0
        x2_shift = 1.0 if self.form == "printed_x2" else -1.0

        def delta(x, y):
            return 1 + mu * (x * x + y * y)

        def x1(x, y, z):
            num = -2 * a2 * mu * x * y + a3 * (mu * (x * x - y * y) + 1) - 2 * a4 * mu * y + 2 * a1 * y
            return num / (lam * delta(x, y)) + a5 * sin(lam * z) - a6 * cos(lam * z)

        def x2(x, y, z):
            num = 2 * mu * x * (a3 * y + a4) + a2 * (mu * (x * x - y * y) + x2_shift) - 2 * a1 * x
            return num / (lam * delta(x, y)) + a5 * cos(lam * z) + a6 * sin(lam * z)

        def x3(x, y, z):
            num = a1 * (x * x + x3_sign * y * y) + a2 * x + a3 * y + a4
            return num / delta(x, y)

        return VectorField(ScalarField(x1, "X1"), ScalarField(x2, "X2"), ScalarField(x3, "X3"))
