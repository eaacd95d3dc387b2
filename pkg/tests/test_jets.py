"""Tests for second-order jets."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from lbcv.errors import DomainError
from lbcv.geometry import coframe, frame_coefficients
from lbcv.jets import (
    FD_REL_TOL,
    FD_STEP,
    Jet2,
    ScalarField,
    cos,
    finite_difference_error,
    jet_arith,
    jet_coordinate,
    jet_elementary,
    jet_power,
    sin,
)
from lbcv.models import FrameGrid, FramePoint, SpaceParams

coefficient = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False)
unit = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
coordinate = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


class TestCoordinates:
    @pytest.mark.parametrize(
        "axis, point, value, grad",
        [
            ("x", FramePoint(3, 0, 0), 3.0, [1, 0, 0]),
            ("z", FramePoint(1, 2, 5), 5.0, [0, 0, 1]),
            ("y", FramePoint(0, -2, 1), -2.0, [0, 1, 0]),
        ],
    )
    def test_coordinate_jet(self, axis, point, value, grad):
        jet = jet_coordinate(axis, point)
        assert float(jet.value) == value
        assert_array_equal(jet.grad, grad)
        assert_array_equal(jet.hess, np.zeros((3, 3)))

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            jet_coordinate("w", FramePoint(0, 0, 0))

    def test_batched_coordinates(self, grid):
        jet = jet_coordinate("y", grid)
        assert jet.value.shape == (len(grid),)
        assert_array_equal(jet.value, grid.xyz[:, 1])
        assert_array_equal(jet.grad[:, 1], np.ones(len(grid)))


class TestArithmetic:
    def test_square(self):
        x = jet_coordinate("x", FramePoint(3, 0, 0))
        sq = jet_arith("mul", x, x)
        assert float(sq.value) == 9.0
        assert sq.grad[0] == 6.0
        assert sq.hess[0, 0] == 2.0

    def test_sum(self):
        p = FramePoint(1, 2, 0)
        s = jet_arith("add", jet_coordinate("x", p), jet_coordinate("y", p))
        assert float(s.value) == 3.0
        assert_array_equal(s.grad, [1, 1, 0])

    def test_reciprocal_of_delta(self):
        f = ScalarField(lambda x, y, z: 1.0 / (1.0 + x * x + y * y))
        p = FramePoint(1, 1, 0)
        assert float(f(p).value) == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert finite_difference_error(f, p, FD_STEP) <= FD_REL_TOL

    def test_division_by_zero_names_denominator(self):
        x = jet_coordinate("x", FramePoint(0, 1, 0))
        with pytest.raises(DomainError, match="delta"):
            jet_arith("div", 1.0, x, label="delta")

    def test_negation_and_subtraction(self):
        p = FramePoint(0.5, -1.0, 2.0)
        x, y = jet_coordinate("x", p), jet_coordinate("y", p)
        d = x - y
        assert float(d.value) == 1.5
        assert_array_equal((-d).grad, [-1, 1, 0])

    def test_unknown_operation(self):
        with pytest.raises(ValueError):
            jet_arith("pow", 1.0, 2.0)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            jet_power(jet_coordinate("x", FramePoint(1, 0, 0)), -1)

    def test_zeroth_power_is_one(self):
        jet = jet_coordinate("x", FramePoint(2, 0, 0)) ** 0
        assert float(jet.value) == 1.0
        assert_array_equal(jet.grad, np.zeros(3))


class TestElementary:
    def test_sin_at_zero(self):
        jet = sin(jet_coordinate("z", FramePoint(0, 0, 0)))
        assert float(jet.value) == 0.0
        assert jet.grad[2] == 1.0
        assert jet.hess[2, 2] == 0.0

    def test_cos_at_zero(self):
        jet = cos(jet_coordinate("z", FramePoint(0, 0, 0)))
        assert float(jet.value) == 1.0
        assert jet.grad[2] == 0.0
        assert jet.hess[2, 2] == -1.0

    def test_sin_of_scaled_coordinate(self):
        f = ScalarField(lambda x, y, z: sin(2 * z))
        assert finite_difference_error(f, FramePoint(0, 0, 0.7)) <= FD_REL_TOL

    def test_unknown_function(self):
        with pytest.raises(ValueError):
            jet_elementary("tan", 1.0)


class TestJetProperties:
    @given(
        a=st.lists(coefficient, min_size=4, max_size=4),
        b=st.lists(coefficient, min_size=4, max_size=4),
        x=coordinate,
        y=coordinate,
        z=coordinate,
    )
    @settings(max_examples=100, deadline=None)
    def test_product_rule(self, a, b, x, y, z):
        """jet(f * g) agrees with the Leibniz rule applied to jet(f), jet(g)."""

        def poly(c):
            return lambda x, y, z: c[0] + c[1] * x * y + c[2] * z * z + c[3] * x * x * y

        f, g = ScalarField(poly(a)), ScalarField(poly(b))
        fg = ScalarField(lambda x, y, z: poly(a)(x, y, z) * poly(b)(x, y, z))
        p = FramePoint(x, y, z)
        jf, jg, jfg = f(p), g(p), fg(p)

        assert_allclose(jfg.value, jf.value * jg.value, rtol=1e-12, atol=1e-12)
        assert_allclose(jfg.grad, jf.value * jg.grad + jg.value * jf.grad, rtol=1e-12, atol=1e-12)
        expected = (
            jf.value * jg.hess
            + jg.value * jf.hess
            + np.outer(jf.grad, jg.grad)
            + np.outer(jg.grad, jf.grad)
        )
        assert_allclose(jfg.hess, expected, rtol=1e-12, atol=1e-12)

    @given(
        c=st.lists(unit, min_size=5, max_size=5),
        x=coordinate,
        y=coordinate,
        z=coordinate,
    )
    @settings(max_examples=100, deadline=None)
    def test_random_composites_match_finite_differences(self, c, x, y, z):
        f = ScalarField(
            lambda x, y, z: c[0] * x * y
            + c[1] * sin(c[2] * z + x)
            + c[3] * y * y * cos(x) / (1.0 + x * x + y * y)
            + c[4] * z
        )
        assert finite_difference_error(f, FramePoint(x, y, z)) <= FD_REL_TOL

    @given(c=st.lists(coefficient, min_size=3, max_size=3), x=coordinate, y=coordinate, z=coordinate)
    @settings(max_examples=50, deadline=None)
    def test_hessian_symmetric_after_chains(self, c, x, y, z):
        f = ScalarField(lambda x, y, z: cos(c[0] * x * y) * sin(z + c[1] * y) / (2.0 + x * x) - c[2] * (x * z) ** 3)
        jet = f(FramePoint(x, y, z))
        assert_array_equal(jet.hess, jet.hess.T)
        assert jet.is_finite()


class _JetPoint:
    """Coordinate jets seen as a point, so geometry helpers can run inside a field expression."""

    def __init__(self, x, y, z):
        self.jets = (x, y, z)

    def coordinates(self):
        return tuple(j.value for j in self.jets)


class TestFrameCoefficients:
    @pytest.mark.parametrize("params", [SpaceParams(2.0, 1.0), SpaceParams(-1.0, -0.25), SpaceParams(0.5, 2.0)])
    @pytest.mark.parametrize("point", [FramePoint(0.3, -0.2, 0.1), FramePoint(-0.7, 0.6, 1.5)])
    def test_frame_and_coframe_match_finite_differences(self, params, point):
        for table in (frame_coefficients, coframe):
            for i in range(3):
                for a in range(3):
                    f = ScalarField(lambda x, y, z, i=i, a=a, t=table: t(params, _JetPoint(x, y, z))[i][a])
                    assert finite_difference_error(f, point) <= FD_REL_TOL


class TestScalarField:
    def test_deterministic(self):
        f = ScalarField(lambda x, y, z: x * sin(y) + z)
        p = FramePoint(0.1, 0.2, 0.3)
        a, b = f(p), f(p)
        assert_array_equal(a.value, b.value)
        assert_array_equal(a.grad, b.grad)
        assert_array_equal(a.hess, b.hess)

    def test_constant_broadcasts_over_grid(self, grid):
        jet = ScalarField.constant(2.5)(grid)
        assert jet.value.shape == (len(grid),)
        assert np.all(jet.value == 2.5)
        assert np.all(jet.grad == 0.0)

    def test_batch_matches_pointwise(self, grid):
        f = ScalarField(lambda x, y, z: x * y / (1.0 + z * z) + cos(x))
        batch = f(grid)
        for idx in (0, 17, len(grid) - 1):
            single = f(grid.point(idx))
            assert_allclose(batch.value[idx], single.value, rtol=0, atol=1e-15)
            assert_allclose(batch.grad[idx], single.grad, rtol=0, atol=1e-15)
            assert_allclose(batch.hess[idx], single.hess, rtol=0, atol=1e-15)

    def test_partial_is_exact_for_quadratics(self):
        f = ScalarField(lambda x, y, z: 3 * x * x + x * y - 2 * z)
        p = FramePoint(0.4, -0.3, 0.2)
        dx = f(p).partial("x")
        assert float(dx.value) == pytest.approx(6 * 0.4 - 0.3)
        assert_allclose(dx.grad, [6, 1, 0])

    def test_bad_shapes_rejected(self):
        with pytest.raises(ValueError):
            Jet2(np.array(1.0), np.zeros(2), np.zeros((3, 3)))

