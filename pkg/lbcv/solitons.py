"""Lie derivative of the metric, soliton residuals and the Case-1 constraints.

A candidate (X, gamma) is a Ricci soliton when L_X g + rho = gamma g. The
residual is evaluated two ways: in the frame, from the closed-form Lie
derivative, and as the six scalar equations of the first-order PDE system in
x, y, z. ``equivalence_check`` compares the two after the normalization

    r1 = -F11/2, r2 = F12, r3 = F13, r4 = -F22/2, r5 = F23, r6 = -F33/2

where F is the frame residual and r the PDE residual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from lbcv.errors import PreconditionError
from lbcv.geometry import (
    EPS,
    ETA,
    connection_table,
    delta_jet,
    frame_derivatives,
    require_in_domain,
    ricci,
)
from lbcv.jets import ScalarField
from lbcv.models import (
    FrameGrid,
    FramePoint,
    Points,
    ResidualReport,
    RunConfig,
    SolitonCandidate,
    SpaceParams,
    VectorField,
)

logger = logging.getLogger(__name__)

# Exact-case dispatch tolerance on lambda, mu and the obstruction constant.
CASE_TOL = 1e-12

E12Form = Literal["corrected", "printed"]
ConstraintForm = Literal["A", "f"]

SYSTEM36_EQUATIONS = 6


def _xy(p: Points, ndim: int) -> Tuple[np.ndarray, np.ndarray]:
    """Coordinates reshaped to broadcast against arrays with ``ndim`` batch axes."""
    x, y, _ = p.coordinates()
    extra = ndim - np.ndim(x)
    return np.reshape(x, np.shape(x) + (1,) * extra), np.reshape(y, np.shape(y) + (1,) * extra)


def lie_derivative_metric(
    X: VectorField,
    params: SpaceParams,
    p: Points,
    e12_form: E12Form = "corrected",
) -> np.ndarray:
    """(L_X g)(E_i, E_j) from the closed-form frame expressions.

    The printed (E1, E2) line reads E1(X2) + E2(X2); the form consistent with
    the PDE system is E1(X2) + E2(X1). ``e12_form="printed"`` evaluates the
    former so the discrepancy can be demonstrated.
    """
    require_in_domain(params, p)
    jets = X.components(p)
    d = frame_derivatives(jets, params, p)
    v = [j.value for j in jets]
    x, y, _ = p.coordinates()
    lam, mu = params.lam, params.mu

    l11 = 2.0 * (d[..., 0, 0] - 2.0 * mu * y * v[1])
    if e12_form == "corrected":
        cross = d[..., 0, 1] + d[..., 1, 0]
    elif e12_form == "printed":
        cross = d[..., 0, 1] + d[..., 1, 1]
    else:
        raise ValueError(f"Unknown (E1,E2) form: {e12_form!r}")
    l12 = 2.0 * mu * x * v[1] + 2.0 * mu * y * v[0] + cross
    l13 = d[..., 2, 0] - d[..., 0, 2] - lam * v[1]
    l22 = 2.0 * (d[..., 1, 1] - 2.0 * mu * x * v[0])
    l23 = lam * v[0] - d[..., 1, 2] + d[..., 2, 1]
    l33 = -2.0 * d[..., 2, 2]

    out = np.empty(np.shape(l11) + (3, 3))
    out[..., 0, 0], out[..., 1, 1], out[..., 2, 2] = l11, l22, l33
    out[..., 0, 1] = out[..., 1, 0] = l12
    out[..., 0, 2] = out[..., 2, 0] = l13
    out[..., 1, 2] = out[..., 2, 1] = l23
    return out


def lie_derivative_metric_koszul(X: VectorField, params: SpaceParams, p: Points) -> np.ndarray:
    """(L_X g)(E_i, E_j) = g(nabla_{E_i} X, E_j) + g(E_i, nabla_{E_j} X) via the connection."""
    jets = X.components(p)
    w = connection_table(params, p)
    d = frame_derivatives(jets, params, p)
    v = np.stack([j.value for j in jets], axis=-1)
    # nabla_{E_i} X = sum_a (E_i(X_a) + sum_b X_b w[i, b, a]) E_a
    nab = d + np.einsum("...b,...iba->...ia", v, w)
    lowered = nab * EPS
    return lowered + np.swapaxes(lowered, -1, -2)


def soliton_residual_frame(
    c: SolitonCandidate,
    params: SpaceParams,
    p: Points,
    e12_form: E12Form = "corrected",
) -> np.ndarray:
    """L_X g + rho - gamma eta in the frame; zero exactly for solitons."""
    return lie_derivative_metric(c.field, params, p, e12_form) + ricci(params) - c.gamma * ETA


def system36_lines(
    values: np.ndarray,
    grads: np.ndarray,
    gamma: float,
    params: SpaceParams,
    p: Points,
) -> np.ndarray:
    """Left-minus-right residuals of the six PDE lines.

    ``values[..., c]`` holds X_c and ``grads[..., c, a]`` its partial along
    axis a; any leading batch shape whose first axes match the points works.
    """
    x, y = _xy(p, values.ndim - 1)
    lam, mu = params.lam, params.mu
    d = 1.0 + mu * (x * x + y * y)
    h = 0.5 * lam
    rhs = 0.5 * (4.0 * mu + lam**2 - gamma)
    X1, X2, _ = values[..., 0], values[..., 1], values[..., 2]
    D = grads

    r1 = 2 * mu * y * X2 - d * D[..., 0, 0] + h * y * D[..., 0, 2] - rhs
    r2 = (
        2 * mu * x * X2
        + 2 * mu * y * X1
        + d * D[..., 1, 0]
        - h * y * D[..., 1, 2]
        + d * D[..., 0, 1]
        + h * x * D[..., 0, 2]
    )
    r3 = -lam * X2 - d * D[..., 2, 0] + h * y * D[..., 2, 2] + D[..., 0, 2]
    r4 = 2 * mu * x * X1 - d * D[..., 1, 1] - h * x * D[..., 1, 2] - rhs
    r5 = lam * X1 - d * D[..., 2, 1] - h * x * D[..., 2, 2] + D[..., 1, 2]
    r6 = D[..., 2, 2] - 0.5 * gamma
    return np.stack(np.broadcast_arrays(r1, r2, r3, r4, r5, r6), axis=-1)


def system36_residual(c: SolitonCandidate, params: SpaceParams, p: Points) -> np.ndarray:
    """The six PDE-system residuals of a candidate at p."""
    require_in_domain(params, p)
    jets = c.field.components(p)
    values = np.stack([j.value for j in jets], axis=-1)
    grads = np.stack([j.grad for j in jets], axis=-2)
    return system36_lines(values, grads, c.gamma, params, p)


def frame_to_lines(frame: np.ndarray) -> np.ndarray:
    """Map a frame residual matrix onto the scale of the six PDE lines."""
    return np.stack(
        [
            -0.5 * frame[..., 0, 0],
            frame[..., 0, 1],
            frame[..., 0, 2],
            -0.5 * frame[..., 1, 1],
            frame[..., 1, 2],
            -0.5 * frame[..., 2, 2],
        ],
        axis=-1,
    )


def equivalence_check(
    c: SolitonCandidate,
    params: SpaceParams,
    p: Points,
    e12_form: E12Form = "corrected",
) -> float:
    """Largest discrepancy between the frame and PDE formulations, over all points."""
    lines = system36_residual(c, params, p)
    frame = frame_to_lines(soliton_residual_frame(c, params, p, e12_form))
    return float(np.max(np.abs(lines - frame)))


def obstruction_delta(params: SpaceParams) -> float:
    """Delta = lambda mu (2 mu + lambda^2 / 2); Case-1 solitons exist iff it vanishes."""
    if abs(params.lam) <= CASE_TOL:
        raise PreconditionError("The obstruction constant is only defined for lambda != 0")
    return params.lam * params.mu * (2.0 * params.mu + 0.5 * params.lam**2)


def constraint_A_residual(
    A: ScalarField,
    params: SpaceParams,
    p: Points,
    form: ConstraintForm = "A",
) -> np.ndarray:
    """Residuals of the two integrability constraints on A(x, y).

    form="A" evaluates them directly in A. form="f" evaluates the equivalent
    pair in f = delta A and rescales by delta and -delta, which makes both
    forms agree exactly.
    """
    dlt = obstruction_delta(params)
    require_in_domain(params, p)
    jet = A(p)
    if np.any(jet.grad[..., 2] != 0.0) or np.any(jet.hess[..., 2, :] != 0.0):
        raise PreconditionError(f"A must not depend on z ({A.name})")
    lam, mu = params.lam, params.mu
    x, y, _ = p.coordinates()
    d = 1.0 + mu * (x * x + y * y)

    if form == "A":
        ax, ay = jet.grad[..., 0], jet.grad[..., 1]
        axx, axy, ayy = jet.hess[..., 0, 0], jet.hess[..., 0, 1], jet.hess[..., 1, 1]
        first = dlt * (x * x - y * y) + d * (2 * mu * (x * ay + y * ax) + d * axy)
        second = 2 * lam * mu * (4 * mu + lam**2) * x * y + d * (
            4 * mu * (y * ay - x * ax) + d * (ayy - axx)
        )
    elif form == "f":
        f = delta_jet(params, p) * jet
        fxx, fxy, fyy = f.hess[..., 0, 0], f.hess[..., 0, 1], f.hess[..., 1, 1]
        first = d * (fxy - dlt * (y * y - x * x) / d)
        second = -d * ((fxx - fyy) - 4 * dlt * x * y / d)
    else:
        raise ValueError(f"Unknown constraint form: {form!r}")
    return np.stack(np.broadcast_arrays(first, second), axis=-1)


# Sampling and aggregation -----------------------------------------------------


def default_grid(config: Optional[RunConfig] = None) -> FrameGrid:
    """Regular grid over the configured box (5 x 5 x 5 on [-0.9, 0.9]^3 by default)."""
    config = config or RunConfig()
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(config.bounds, config.resolution)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return FrameGrid(np.stack([m.ravel() for m in mesh], axis=-1))


def sample_points(params: SpaceParams, config: Optional[RunConfig] = None) -> FrameGrid:
    """Grid plus seeded random points in the box, keeping those with delta above the floor."""
    config = config or RunConfig()
    grid = default_grid(config).xyz
    rng = np.random.default_rng(config.seed)
    lo = np.array([b[0] for b in config.bounds])
    hi = np.array([b[1] for b in config.bounds])
    extra = lo + (hi - lo) * rng.random((config.random_points, 3))
    xyz = np.concatenate([grid, extra], axis=0)
    keep = params.delta(xyz[:, 0], xyz[:, 1]) > config.delta_floor
    dropped = int(np.count_nonzero(~keep))
    if dropped:
        logger.warning(f"Dropped {dropped} of {len(xyz)} sample points with delta <= {config.delta_floor}")
    if not np.any(keep):
        logger.warning(f"No sample points left inside D for mu={params.mu}")
    return FrameGrid(xyz[keep])


def aggregate(residuals: np.ndarray, points: FrameGrid, formulation: str = "") -> ResidualReport:
    """Max/argmax over points; ties resolve to the lexicographically smallest point."""
    n = len(points)
    if n == 0:
        return ResidualReport(0.0, np.zeros(residuals.shape[1:]), 0, None, formulation)
    mags = np.abs(residuals)
    per_point = mags.reshape(n, -1).max(axis=1)
    best = per_point.max()
    tied = np.flatnonzero(per_point == best)
    xyz = points.xyz[tied]
    winner = tied[np.lexsort((xyz[:, 2], xyz[:, 1], xyz[:, 0]))[0]]
    return ResidualReport(
        max_abs=float(best),
        per_equation=mags.max(axis=0),
        points_evaluated=n,
        worst_point=points.point(int(winner)),
        formulation=formulation,
    )


@dataclass(frozen=True)
class Verification:
    """Both residual formulations of one candidate over one point set."""

    system36: ResidualReport
    frame: ResidualReport

    @property
    def max_abs(self) -> float:
        return max(self.system36.max_abs, self.frame.max_abs)

    @property
    def worst_point(self) -> Optional[FramePoint]:
        worst = self.system36 if self.system36.max_abs >= self.frame.max_abs else self.frame
        return worst.worst_point

    def passed(self, tolerance: float) -> bool:
        return self.max_abs <= tolerance


def verify_candidate(
    c: SolitonCandidate,
    params: SpaceParams,
    points: Optional[FrameGrid] = None,
    config: Optional[RunConfig] = None,
) -> Verification:
    """Evaluate both residual formulations of ``c`` over the sample."""
    if points is None:
        points = sample_points(params, config)
    if len(points) == 0:
        empty = aggregate(np.zeros((0, SYSTEM36_EQUATIONS)), points, "system36")
        return Verification(empty, aggregate(np.zeros((0, 3, 3)), points, "frame"))
    lines = aggregate(system36_residual(c, params, points), points, "system36")
    frame = aggregate(soliton_residual_frame(c, params, points), points, "frame")
    logger.debug(
        f"Verified {c.family} candidate on {len(points)} points: "
        f"system36 {lines.max_abs:.3e}, frame {frame.max_abs:.3e}"
    )
    return Verification(lines, frame)
