"""Frame geometry of the LBCV space M(lambda, mu).

The metric

    g = (dx^2 + dy^2) / delta^2 - (dz + (lambda/2)(y dx - x dy) / delta)^2,
    delta = 1 + mu (x^2 + y^2),

has the orthonormal frame

    E1 = delta d/dx - (lambda y / 2) d/dz
    E2 = delta d/dy + (lambda x / 2) d/dz
    E3 = d/dz

with g(Ei, Ej) = diag(1, 1, -1). Brackets, connection and curvature are
computed generically from jets of the frame coefficients; the closed forms
below are kept alongside so every generic result can be checked.

Curvature convention
--------------------
R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, and the
(0,4) components are R_ijkl = -g(R(Ei, Ej)Ek, El) = g(R(Ei, Ej)El, Ek), which
gives R_1212 = 4 mu + 3 lambda^2 / 4 and R_1313 = R_2323 = lambda^2 / 4.
The trace rho_c(Ea, Eb) = sum_k eps_k g(R(Ek, Ea)Eb, Ek) equals
diag(4 mu + lambda^2/2, 4 mu + lambda^2/2, lambda^2/2). The normative Ricci
table diag(4 mu + lambda^2, 4 mu + lambda^2, 0) differs from it by exactly
(lambda^2 / 2) g, so ricci(params) = rho_c + ricci_shift(params). No choice of
signature weights removes the shift: E3 is a unit Killing field, so
rho_c(E3, E3) = |nabla E3|^2 = lambda^2 / 2. A metric multiple only moves the
soliton constant, so the soliton system built on the normative table is
unaffected in form. ``check_conventions`` asserts all of the above.
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from lbcv.errors import ConventionError, DomainError
from lbcv.jets import Jet2, ScalarField, as_jet, coordinate_jets
from lbcv.models import FrameGrid, FramePoint, FrameVector, Points, SpaceParams

logger = logging.getLogger(__name__)

EPS = np.array([1.0, 1.0, -1.0])
ETA = np.diag(EPS)

CONVENTION_TOL = 1e-9


def _index(i: int) -> int:
    if i not in (1, 2, 3):
        raise ValueError(f"Frame index must be 1, 2 or 3, got {i!r}")
    return i - 1


def delta(params: SpaceParams, p: Points) -> np.ndarray:
    """delta = 1 + mu (x^2 + y^2); positive exactly on D."""
    x, y, _ = p.coordinates()
    return params.delta(x, y)


def require_in_domain(params: SpaceParams, p: Points) -> None:
    d = np.atleast_1d(delta(params, p))
    bad = np.flatnonzero(~(d > 0.0))
    if bad.size:
        where = p.point(int(bad[0])) if isinstance(p, FrameGrid) else p
        raise DomainError(
            f"Point {where.as_tuple()} is outside D for mu={params.mu}: delta = {d[bad[0]]}"
        )


def delta_jet(params: SpaceParams, p: Points) -> Jet2:
    x, y, _ = coordinate_jets(p)
    return 1.0 + params.mu * (x * x + y * y)


def frame_coefficients(params: SpaceParams, p: Points) -> List[List[Jet2]]:
    """Coordinate components e[i][a] of the frame fields, as jets."""
    x, y, _ = coordinate_jets(p)
    d = 1.0 + params.mu * (x * x + y * y)
    zero, one = as_jet(0.0), as_jet(1.0)
    half = 0.5 * params.lam
    return [
        [d, zero, -half * y],
        [zero, d, half * x],
        [zero, zero, one],
    ]


def coframe(params: SpaceParams, p: Points) -> List[List[Jet2]]:
    """Dual 1-forms theta[k][a]: dx/delta, dy/delta, dz + (lambda/2)(y dx - x dy)/delta."""
    x, y, _ = coordinate_jets(p)
    inv = 1.0 / (1.0 + params.mu * (x * x + y * y))
    zero, one = as_jet(0.0), as_jet(1.0)
    half = 0.5 * params.lam
    return [
        [inv, zero, zero],
        [zero, inv, zero],
        [half * y * inv, -half * x * inv, one],
    ]


def _values(jets: Sequence[Sequence[Jet2]], shape: Tuple[int, ...]) -> np.ndarray:
    return np.stack(
        [np.stack([j.broadcast(shape).value for j in row], axis=-1) for row in jets], axis=-2
    )


def _batch_shape(p: Points) -> Tuple[int, ...]:
    return np.shape(p.coordinates()[0])


def frame_matrix(params: SpaceParams, p: Points) -> np.ndarray:
    """Values e[..., i, a] of the frame coefficients."""
    return _values(frame_coefficients(params, p), _batch_shape(p))


def frame_derivative(i: int, f: ScalarField, params: SpaceParams, p: Points) -> np.ndarray:
    """E_i(f) at p."""
    require_in_domain(params, p)
    e = frame_matrix(params, p)[..., _index(i), :]
    return np.sum(e * f(p).grad, axis=-1)


def frame_derivatives(jets: Sequence[Jet2], params: SpaceParams, p: Points) -> np.ndarray:
    """D[..., i, j] = E_i(f_j) for already-evaluated jets f_j."""
    e = frame_matrix(params, p)
    grads = np.stack([j.grad for j in jets], axis=-2)
    return np.einsum("...ia,...ja->...ij", e, grads)


def structure_functions(params: SpaceParams, p: Points) -> Tuple[np.ndarray, np.ndarray]:
    """C[..., i, j, k], the E_k coefficient of [E_i, E_j], with its gradient C_grad[..., i, j, k, a]."""
    e = frame_coefficients(params, p)
    theta = coframe(params, p)
    shape = _batch_shape(p)
    value = np.zeros(shape + (3, 3, 3))
    grad = np.zeros(shape + (3, 3, 3, 3))
    for i in range(3):
        for j in range(3):
            # coordinate bracket V^a = e_i(e_j^a) - e_j(e_i^a)
            v = [
                sum(
                    (e[i][b] * e[j][a].partial(b) - e[j][b] * e[i][a].partial(b) for b in range(3)),
                    as_jet(0.0),
                )
                for a in range(3)
            ]
            for k in range(3):
                c = sum((theta[k][a] * v[a] for a in range(3)), as_jet(0.0)).broadcast(shape)
                value[..., i, j, k] = c.value
                grad[..., i, j, k, :] = c.grad
    return value, grad


def lie_bracket(i: int, j: int, params: SpaceParams, p: Points) -> FrameVector:
    """Frame components of [E_i, E_j] at p."""
    require_in_domain(params, p)
    c, _ = structure_functions(params, p)
    return FrameVector(c[..., _index(i), _index(j), :])


def _connection_arrays(params: SpaceParams, p: Points) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(w, w_grad, C, C_grad) with nabla_{E_i} E_j = sum_m w[..., i, j, m] E_m."""
    c, c_grad = structure_functions(params, p)
    # C_low[i,j,k] = g([Ei,Ej], Ek); Koszul with constant eta:
    # g(nabla_Ei Ej, Ek) = (C_low[i,j,k] - C_low[i,k,j] - C_low[j,k,i]) / 2
    low = c * EPS
    low_grad = c_grad * EPS[:, None]
    gamma = 0.5 * (
        low
        - np.einsum("...ikj->...ijk", low)
        - np.einsum("...jki->...ijk", low)
    )
    gamma_grad = 0.5 * (
        low_grad
        - np.einsum("...ikja->...ijka", low_grad)
        - np.einsum("...jkia->...ijka", low_grad)
    )
    return gamma * EPS, gamma_grad * EPS[:, None], c, c_grad


def connection_table(params: SpaceParams, p: Points) -> np.ndarray:
    """All connection coefficients w[..., i, j, m]."""
    require_in_domain(params, p)
    return _connection_arrays(params, p)[0]


def connection_coeffs(i: int, j: int, params: SpaceParams, p: Points) -> FrameVector:
    """Frame components of nabla_{E_i} E_j at p."""
    return FrameVector(connection_table(params, p)[..., _index(i), _index(j), :])


def curvature_operator_table(params: SpaceParams, p: Points) -> np.ndarray:
    """r[..., i, j, k, n]: E_n component of R(E_i, E_j)E_k (unnormalized)."""
    require_in_domain(params, p)
    w, w_grad, c, _ = _connection_arrays(params, p)
    e = frame_matrix(params, p)
    # D[i,j,k,n] = E_i(w[j,k,n])
    d = np.einsum("...ia,...jkna->...ijkn", e, w_grad)
    q = np.einsum("...jkm,...imn->...ijkn", w, w)
    return (
        d
        - np.einsum("...jikn->...ijkn", d)
        + q
        - np.einsum("...jikn->...ijkn", q)
        - np.einsum("...ijm,...mkn->...ijkn", c, w)
    )


def curvature_operator(i: int, j: int, k: int, params: SpaceParams, p: Points) -> FrameVector:
    """Frame components of R(E_i, E_j)E_k."""
    r = curvature_operator_table(params, p)
    return FrameVector(r[..., _index(i), _index(j), _index(k), :])


def curvature_tensor(params: SpaceParams, p: Points) -> np.ndarray:
    """R[..., i, j, k, l] = -g(R(E_i, E_j)E_k, E_l)."""
    return -curvature_operator_table(params, p) * EPS


def curvature_component(i: int, j: int, k: int, l: int, params: SpaceParams, p: Points) -> np.ndarray:
    """R_ijkl at p, normalized to reproduce R_1212 = 4 mu + 3 lambda^2 / 4."""
    r = curvature_tensor(params, p)
    return r[..., _index(i), _index(j), _index(k), _index(l)]


def contracted_ricci(params: SpaceParams, p: Points) -> np.ndarray:
    """rho_c(Ea, Eb) = sum_k eps_k g(R(Ek, Ea)Eb, Ek), from the generic curvature."""
    r = curvature_operator_table(params, p)
    # eps_k g(., Ek) = eps_k^2 (.)^k
    return np.einsum("...kabk->...ab", r)


def ricci(params: SpaceParams) -> np.ndarray:
    """Normative Ricci table: diag(4 mu + lambda^2, 4 mu + lambda^2, 0)."""
    r11 = 4.0 * params.mu + params.lam**2
    return np.diag([r11, r11, 0.0])


def ricci_shift(params: SpaceParams) -> np.ndarray:
    """ricci(params) - contracted_ricci(params, p) = (lambda^2 / 2) g."""
    return 0.5 * params.lam**2 * ETA


def sectional_curvature(i: int, j: int, params: SpaceParams) -> float:
    """K(E_i, E_j) = R_ijij / (eps_i eps_j)."""
    a, b = _index(i), _index(j)
    if a == b:
        raise ValueError("Sectional curvature needs two distinct frame vectors")
    return float(curvature_closed_form(params)[a, b, a, b] / (EPS[a] * EPS[b]))


# Closed forms ---------------------------------------------------------------


def bracket_closed_form(params: SpaceParams, p: Points) -> np.ndarray:
    """[E1,E2] = -2 mu y E1 + 2 mu x E2 + lambda E3; brackets with E3 vanish."""
    x, y, _ = p.coordinates()
    shape = np.shape(x)
    c = np.zeros(shape + (3, 3, 3))
    b12 = np.stack(np.broadcast_arrays(-2 * params.mu * y, 2 * params.mu * x, np.full(shape, params.lam)), axis=-1)
    c[..., 0, 1, :] = b12
    c[..., 1, 0, :] = -b12
    return c


def connection_closed_form(params: SpaceParams, p: Points) -> np.ndarray:
    x, y, _ = p.coordinates()
    lam, mu = params.lam, params.mu
    shape = np.shape(x)
    w = np.zeros(shape + (3, 3, 3))
    h = 0.5 * lam
    w[..., 0, 0, 1] = 2 * mu * y
    w[..., 0, 1, 0] = -2 * mu * y
    w[..., 0, 1, 2] = h
    w[..., 0, 2, 1] = h
    w[..., 1, 0, 1] = -2 * mu * x
    w[..., 1, 0, 2] = -h
    w[..., 1, 1, 0] = 2 * mu * x
    w[..., 1, 2, 0] = -h
    w[..., 2, 0, 1] = h
    w[..., 2, 1, 0] = -h
    return w


def curvature_closed_form(params: SpaceParams) -> np.ndarray:
    """R_ijkl from R_1212 = 4 mu + 3 lambda^2/4, R_1313 = R_2323 = lambda^2/4."""
    lam, mu = params.lam, params.mu
    r = np.zeros((3, 3, 3, 3))
    for (a, b), value in {
        (0, 1): 4 * mu + 0.75 * lam**2,
        (0, 2): 0.25 * lam**2,
        (1, 2): 0.25 * lam**2,
    }.items():
        r[a, b, a, b] = r[b, a, b, a] = value
        r[a, b, b, a] = r[b, a, a, b] = -value
    return r


def reference_params() -> List[SpaceParams]:
    return [SpaceParams(2.0, 1.0), SpaceParams(1.0, -0.25), SpaceParams(-1.5, 0.3), SpaceParams(0.0, -1.0)]


def check_conventions(
    samples: Optional[Iterable[SpaceParams]] = None,
    point: Optional[FramePoint] = None,
    tol: float = CONVENTION_TOL,
) -> None:
    """Assert the generic curvature and Ricci against the closed forms and the shift identity.

    Errors are relative to the largest closed-form component (at least 1).
    """
    point = point or FramePoint(0.3, -0.2, 0.1)
    for params in samples or reference_params():
        if not params.delta(point.x, point.y) > 0:
            continue
        closed = curvature_closed_form(params)
        scale = max(1.0, float(np.max(np.abs(closed))))
        r = curvature_tensor(params, point)
        err = float(np.max(np.abs(r - closed))) / scale
        if err > tol:
            raise ConventionError(f"Curvature table mismatch {err:.3e} for {params}")
        shift = ricci(params) - contracted_ricci(params, point)
        err = float(np.max(np.abs(shift - ricci_shift(params)))) / scale
        if err > tol:
            raise ConventionError(f"Ricci contraction mismatch {err:.3e} for {params}")
    logger.debug("Curvature convention self-test passed")
