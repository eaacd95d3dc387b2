"""Tests for Lie derivatives, soliton residuals and the Case-1 constraints."""

import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from lbcv.errors import PreconditionError
from lbcv.jets import ScalarField
from lbcv.models import FrameGrid, FramePoint, RunConfig, SolitonCandidate, SpaceParams, VectorField
from lbcv.solitons import (
    aggregate,
    constraint_A_residual,
    default_grid,
    equivalence_check,
    lie_derivative_metric,
    lie_derivative_metric_koszul,
    obstruction_delta,
    sample_points,
    soliton_residual_frame,
    system36_residual,
    verify_candidate,
)

from conftest import RESIDUAL_TOL, random_field, random_params


def const(c):
    return ScalarField.constant(c)


def field(x1, x2, x3):
    return VectorField(ScalarField(x1), ScalarField(x2), ScalarField(x3))


class TestLieDerivative:
    def test_e3_is_killing(self, grid, rng):
        e3 = VectorField(const(0.0), const(0.0), const(1.0))
        for _ in range(10):
            params = random_params(rng)
            assert_array_equal(lie_derivative_metric(e3, params, grid), np.zeros((len(grid), 3, 3)))

    def test_hand_substitution(self):
        X = field(lambda x, y, z: 0.0, lambda x, y, z: 0.0, lambda x, y, z: z)
        L = lie_derivative_metric(X, SpaceParams(2.0, 0.0), FramePoint(0.0, 1.0, 0.0))
        assert L[2, 2] == pytest.approx(-2.0)
        assert L[0, 2] == pytest.approx(1.0)
        assert L[2, 0] == L[0, 2]

    def test_zero_field(self):
        L = lie_derivative_metric(VectorField.zero(), SpaceParams(1.0, 0.5), FramePoint(0.1, 0.2, 0.3))
        assert_array_equal(L, np.zeros((3, 3)))

    def test_symmetric(self, grid, field_factory):
        L = lie_derivative_metric(field_factory(), SpaceParams(1.0, 0.5), grid)
        assert_array_equal(L, np.swapaxes(L, -1, -2))

    def test_matches_connection_formula(self, grid, rng):
        for _ in range(20):
            params, X = random_params(rng), random_field(rng)
            assert_allclose(
                lie_derivative_metric(X, params, grid),
                lie_derivative_metric_koszul(X, params, grid),
                rtol=0,
                atol=RESIDUAL_TOL,
            )

    @given(
        a=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
        b=st.floats(min_value=-3.0, max_value=3.0, allow_nan=False),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=30, deadline=None)
    def test_linear_in_the_field(self, a, b, seed):
        rng = np.random.default_rng(seed)
        params = random_params(rng)
        X, Y = random_field(rng), random_field(rng)
        combo = VectorField(
            *(
                ScalarField(lambda x, y, z, f=f, g=g: a * f.expr(x, y, z) + b * g.expr(x, y, z))
                for f, g in zip((X.X1, X.X2, X.X3), (Y.X1, Y.X2, Y.X3))
            )
        )
        grid = default_grid()
        expected = a * lie_derivative_metric(X, params, grid) + b * lie_derivative_metric(Y, params, grid)
        assert_allclose(lie_derivative_metric(combo, params, grid), expected, rtol=0, atol=RESIDUAL_TOL)


class TestResiduals:
    def test_case2_field_is_a_soliton(self, grid):
        c = SolitonCandidate(field(lambda x, y, z: 0.0, lambda x, y, z: 0.0, lambda x, y, z: 2 * z), 4.0)
        params = SpaceParams(0.0, 1.0)
        assert np.max(np.abs(soliton_residual_frame(c, params, grid))) <= RESIDUAL_TOL
        assert np.max(np.abs(system36_residual(c, params, grid))) <= RESIDUAL_TOL

    def test_zero_field_residual_is_ricci(self):
        c = SolitonCandidate(VectorField.zero(), 0.0)
        F = soliton_residual_frame(c, SpaceParams(2.0, 1.0), FramePoint(0.3, 0.1, 0.0))
        assert_allclose(F, np.diag([8.0, 8.0, 0.0]), atol=1e-12)

    def test_zero_field_on_minkowski(self):
        c = SolitonCandidate(VectorField.zero(), 0.0)
        F = soliton_residual_frame(c, SpaceParams(0.0, 0.0), FramePoint(0.3, 0.1, 0.0))
        assert_array_equal(F, np.zeros((3, 3)))

    def test_last_line_is_gamma_check(self, rng):
        c = SolitonCandidate(VectorField.zero(), 2.0)
        for _ in range(5):
            r = system36_residual(c, random_params(rng), FramePoint(0.2, 0.2, 0.2))
            assert r[5] == -1.0

    def test_equivalence_on_random_fields(self, rng):
        points = default_grid(RunConfig(resolution=(3, 3, 3)))
        for _ in range(200):
            params = random_params(rng)
            c = SolitonCandidate(random_field(rng), float(rng.uniform(-3.0, 3.0)))
            assert equivalence_check(c, params, points) <= RESIDUAL_TOL

    def test_equivalence_at_reference_parameters(self, field_factory):
        p = FramePoint(0.35, -0.6, 0.8)
        c = SolitonCandidate(field_factory(), 1.7)
        assert equivalence_check(c, SpaceParams(1.0, 0.5), p) <= RESIDUAL_TOL
        assert equivalence_check(SolitonCandidate(VectorField.zero(), 0.0), SpaceParams(1.0, 0.5), p) == 0.0

    def test_printed_cross_term_breaks_equivalence(self, grid):
        # X = y E2: E2(X2) = delta while E2(X1) = 0
        c = SolitonCandidate(field(lambda x, y, z: 0.0, lambda x, y, z: y, lambda x, y, z: 0.0), 0.0)
        params = SpaceParams(1.0, 0.5)
        assert equivalence_check(c, params, grid) <= RESIDUAL_TOL
        assert equivalence_check(c, params, grid, e12_form="printed") > 1e-3

    def test_unknown_cross_term_form(self):
        with pytest.raises(ValueError):
            lie_derivative_metric(VectorField.zero(), SpaceParams(1.0, 0.0), FramePoint(0, 0, 0), e12_form="other")


class TestObstruction:
    @pytest.mark.parametrize("lam, mu, expected", [(2.0, -1.0, 0.0), (1.0, 0.0, 0.0), (2.0, 1.0, 8.0)])
    def test_values(self, lam, mu, expected):
        assert obstruction_delta(SpaceParams(lam, mu)) == expected

    def test_zero_exactly_on_the_two_branches(self, rng):
        for lam in rng.uniform(0.5, 2.0, 20):
            assert obstruction_delta(SpaceParams(lam, 0.0)) == 0.0
            assert obstruction_delta(SpaceParams(lam, -(lam**2) / 4)) == 0.0

    def test_requires_lambda(self):
        with pytest.raises(PreconditionError):
            obstruction_delta(SpaceParams(0.0, 1.0))


def catalog_A(params, a):
    a1, a2, a3, a4 = a
    mu = params.mu
    return ScalarField(lambda x, y, z: (a1 * (x * x + y * y) + a2 * x + a3 * y + a4) / (1 + mu * (x * x + y * y)))


class TestConstraints:
    def test_constant_on_flat_base(self, grid):
        r = constraint_A_residual(const(3.0), SpaceParams(1.0, 0.0), grid)
        assert_array_equal(r, np.zeros((len(grid), 2)))

    def test_catalog_family_satisfies_constraints_when_delta_vanishes(self, rng):
        params = SpaceParams(2.0, -1.0)
        points = sample_points(params)
        for _ in range(20):
            r = constraint_A_residual(catalog_A(params, rng.uniform(-1, 1, 4)), params, points)
            assert np.max(np.abs(r)) <= RESIDUAL_TOL

    def test_catalog_family_fails_when_delta_nonzero(self, rng):
        for _ in range(20):
            lam = float(rng.uniform(0.5, 2.0)) * rng.choice([-1.0, 1.0])
            params = SpaceParams(lam, float(rng.uniform(0.2, 2.0)))
            points = sample_points(params)
            r = constraint_A_residual(catalog_A(params, rng.uniform(-1, 1, 4)), params, points)
            assert np.max(np.abs(r)) > 1e-3

    def test_catalog_family_fails_off_the_steady_curve(self, rng):
        # mu < 0 but mu != -lambda^2/4, so Delta != 0
        for _ in range(20):
            lam = float(rng.uniform(1.0, 2.0)) * rng.choice([-1.0, 1.0])
            params = SpaceParams(lam, -float(rng.uniform(0.3, 0.7)) * lam**2 / 4)
            assert obstruction_delta(params) != 0.0
            points = sample_points(params)
            r = constraint_A_residual(catalog_A(params, rng.uniform(-1, 1, 4)), params, points)
            assert np.max(np.abs(r)) > 1e-3

    def test_direct_substitution(self):
        r = constraint_A_residual(ScalarField(lambda x, y, z: x * y), SpaceParams(1.0, 1.0), FramePoint(1.0, 1.0, 0.0))
        assert r[0] == pytest.approx(21.0)

    def test_both_forms_agree(self, grid, rng):
        for _ in range(10):
            params = SpaceParams(float(rng.uniform(0.5, 2.0)), float(rng.uniform(-0.5, 1.0)))
            A = ScalarField(lambda x, y, z, c=rng.uniform(-1, 1, 3): c[0] * x * y + c[1] * x**3 + c[2] * y * y)
            assert_allclose(
                constraint_A_residual(A, params, grid, form="A"),
                constraint_A_residual(A, params, grid, form="f"),
                rtol=0,
                atol=RESIDUAL_TOL,
            )

    def test_z_dependence_rejected(self):
        with pytest.raises(PreconditionError):
            constraint_A_residual(ScalarField(lambda x, y, z: x * z), SpaceParams(1.0, 0.0), FramePoint(0.1, 0.1, 0.1))

    def test_requires_lambda(self):
        with pytest.raises(PreconditionError):
            constraint_A_residual(const(1.0), SpaceParams(0.0, 1.0), FramePoint(0, 0, 0))


class TestSampling:
    def test_default_grid(self):
        grid = default_grid()
        assert len(grid) == 125
        assert grid.xyz.min() == -0.9
        assert grid.xyz.max() == 0.9

    def test_sample_is_seeded(self):
        params = SpaceParams(1.0, 0.0)
        a = sample_points(params, RunConfig(seed=3))
        b = sample_points(params, RunConfig(seed=3))
        c = sample_points(params, RunConfig(seed=4))
        assert len(a) == 225
        assert_array_equal(a.xyz, b.xyz)
        assert not np.array_equal(a.xyz, c.xyz)

    def test_points_outside_domain_dropped(self):
        params = SpaceParams(2.0, -1.0)
        points = sample_points(params)
        assert len(points) < 225
        assert np.all(params.delta(points.xyz[:, 0], points.xyz[:, 1]) > 0.05)

    def test_dropped_points_are_logged(self, caplog):
        with caplog.at_level(logging.WARNING, logger="lbcv.solitons"):
            sample_points(SpaceParams(2.0, -1.0))
        assert any("Dropped" in record.getMessage() for record in caplog.records)

    def test_argmax_tie_break_is_lexicographic(self):
        points = FrameGrid(np.array([[0.5, 0.0, 0.0], [-0.5, 0.0, 0.0], [-0.5, -1.0, 0.0]]))
        report = aggregate(np.ones((3, 6)), points)
        assert report.worst_point == FramePoint(-0.5, -1.0, 0.0)
        assert report.points_evaluated == 3

    def test_empty_sample(self):
        report = aggregate(np.zeros((0, 6)), FrameGrid(np.zeros((0, 3))))
        assert report.max_abs == 0.0
        assert report.worst_point is None

    def test_verify_candidate_reports_both_formulations(self):
        c = SolitonCandidate(VectorField.zero(), 0.0)
        result = verify_candidate(c, SpaceParams(2.0, 1.0))
        assert result.frame.max_abs == pytest.approx(8.0)
        assert result.system36.max_abs == pytest.approx(4.0)
        assert result.max_abs == pytest.approx(8.0)
        assert not result.passed(1e-9)
