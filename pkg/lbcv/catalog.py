"""Closed-form soliton constructors and the classification of LBCV spaces."""

from __future__ import annotations

import logging
from itertools import product
from typing import List, Optional, Tuple

import numpy as np

from lbcv.families import BalancedFamily, Case1bForm, SolitonFamily, get_family
from lbcv.families.base import is_zero
from lbcv.jets import coordinate_jets
from lbcv.models import (
    CoefficientSet,
    FrameGrid,
    ProbeResult,
    ResidualReport,
    RunConfig,
    SolitonCandidate,
    SolitonClass,
    SpaceParams,
)
from lbcv.solitons import (
    aggregate,
    lie_derivative_metric,
    obstruction_delta,
    sample_points,
    system36_lines,
)

logger = logging.getLogger(__name__)

CASE_III_CAVEAT = (
    "The classification statement asserts steady solitons for every lambda != 0, mu < 0, "
    "but the construction only produces them when mu = -lambda^2/4 (Delta = 0); "
    "no soliton is reported for this mu."
)


def soliton_case1a(params: SpaceParams, coeffs: Optional[CoefficientSet] = None) -> SolitonCandidate:
    """Shrinking soliton on the flat-base bundle (lambda != 0, mu = 0), gamma = 2 lambda^2."""
    return get_family("1a").build(params, coeffs)


def soliton_case1b(
    params: SpaceParams,
    coeffs: Optional[CoefficientSet] = None,
    form: Case1bForm = "corrected",
) -> SolitonCandidate:
    """Steady soliton at mu = -lambda^2/4.

    ``form`` selects the printed variants kept as regression oracles; only
    "corrected" is a soliton for every coefficient set.
    """
    family = get_family("1b") if form == "corrected" else BalancedFamily(form)
    return family.build(params, coeffs)


def soliton_case2(params: SpaceParams, a: float = 0.0) -> SolitonCandidate:
    """X = (0, 0, 2 mu z + a) with gamma = 4 mu."""
    return get_family("2").build(params, CoefficientSet((a,)))


def soliton_case3(gamma: float, coeffs: Optional[CoefficientSet] = None) -> SolitonCandidate:
    """Affine soliton of Minkowski space for any gamma."""
    return get_family("3").build(SpaceParams(0.0, 0.0), coeffs, gamma)


def random_coefficients(
    family: SolitonFamily, rng: np.random.Generator, count: Optional[int] = None
) -> CoefficientSet:
    """Seeded coefficients drawn uniformly from [-1, 1].

    Only the first ``count`` coefficients are drawn (all by default); the rest
    are zero.
    """
    n = family.coefficient_count if count is None else min(count, family.coefficient_count)
    return CoefficientSet(tuple(rng.uniform(-1.0, 1.0, n)))


def classify(params: SpaceParams) -> SolitonClass:
    """Which homogeneous Ricci solitons the space admits, with their constant."""
    lam, mu = params.lam, params.mu

    if is_zero(lam) and is_zero(mu):
        return SolitonClass("flat-any-gamma", None, "Case 3", family="3")
    if is_zero(lam):
        gamma = get_family("2").gamma(params)
        if mu > 0:
            return SolitonClass("shrinking", gamma, "(iv)", family="2")
        return SolitonClass("expanding", gamma, "(v)", family="2")
    if is_zero(mu):
        return SolitonClass("shrinking", get_family("1a").gamma(params), "(ii)", family="1a")
    if mu > 0:
        return SolitonClass("none", None, "(i)")
    if is_zero(obstruction_delta(params)):
        return SolitonClass("steady", get_family("1b").gamma(params), "(iii)", family="1b")

    logger.warning(f"lambda={lam}, mu={mu}: no soliton from the construction, see caveat")
    return SolitonClass("none", None, "(iii)", caveat=CASE_III_CAVEAT)


def killing_check(
    c: SolitonCandidate,
    params: SpaceParams,
    points: Optional[FrameGrid] = None,
    config: Optional[RunConfig] = None,
) -> ResidualReport:
    """Worst |L_X g| over the sample; zero exactly for Killing fields."""
    if points is None:
        points = sample_points(params, config)
    if len(points) == 0:
        return aggregate(np.zeros((0, 3, 3)), points, "killing")
    return aggregate(lie_derivative_metric(c.field, params, points), points, "killing")


def _monomials(degree: int) -> List[Tuple[int, int, int]]:
    return [e for e in product(range(degree + 1), repeat=3) if sum(e) <= degree]


def nonexistence_probe(
    params: SpaceParams,
    points: Optional[FrameGrid] = None,
    config: Optional[RunConfig] = None,
    degree: int = 3,
) -> ProbeResult:
    """Least-squares fit of polynomial fields to the PDE system.

    Each frame component ranges over all monomials of total degree at most
    ``degree`` and gamma is a further unknown. The system is affine in these
    unknowns, so the best fit is one linear solve; a large leftover residual
    is evidence (not proof) that no soliton exists.
    """
    if points is None:
        points = sample_points(params, config)
    n = len(points)
    exponents = _monomials(degree)
    m = len(exponents)
    if n == 0:
        return ProbeResult(0.0, 0.0, 0.0, 3 * m + 1, 0)

    x, y, z = coordinate_jets(points)
    monomials = [(x**i * y**j * z**k).broadcast((n,)) for i, j, k in exponents]

    values = np.zeros((n, 3 * m, 3))
    grads = np.zeros((n, 3 * m, 3, 3))
    for c in range(3):
        for idx, mono in enumerate(monomials):
            values[:, c * m + idx, c] = mono.value
            grads[:, c * m + idx, c, :] = mono.grad

    zero_values, zero_grads = np.zeros((n, 3)), np.zeros((n, 3, 3))
    base = system36_lines(zero_values, zero_grads, 0.0, params, points)
    columns = system36_lines(values, grads, 0.0, params, points) - base[:, None, :]
    gamma_column = system36_lines(zero_values, zero_grads, 1.0, params, points) - base

    matrix = np.concatenate([columns, gamma_column[:, None, :]], axis=1)
    matrix = matrix.transpose(0, 2, 1).reshape(n * 6, 3 * m + 1)
    rhs = -base.reshape(n * 6)
    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    residual = matrix @ solution - rhs

    result = ProbeResult(
        max_residual=float(np.max(np.abs(residual))),
        rms_residual=float(np.sqrt(np.mean(residual**2))),
        gamma_fit=float(solution[-1]),
        unknowns=3 * m + 1,
        points_evaluated=n,
    )
    logger.info(
        f"Probe lambda={params.lam}, mu={params.mu}: max residual {result.max_residual:.3e} "
        f"over {n} points ({result.unknowns} unknowns)"
    )
    return result
