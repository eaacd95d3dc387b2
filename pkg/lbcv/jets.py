"""Second-order forward-mode jets in the coordinates (x, y, z).

A ``Jet2`` carries a function's value together with its gradient and its
symmetric Hessian. Arrays may have a leading batch shape, so one jet can
describe the same field at a whole grid of points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Literal, Optional, Protocol, Tuple, Union

import numpy as np

from lbcv.errors import DomainError

logger = logging.getLogger(__name__)

# Finite-difference oracle constants (tests may pass their own).
FD_STEP = 1e-4
FD_REL_TOL = 1e-6

AXES: Tuple[str, str, str] = ("x", "y", "z")

Axis = Union[Literal["x", "y", "z"], int]
ArithOp = Literal["add", "sub", "mul", "div", "neg"]
Elementary = Literal["sin", "cos"]


class HasCoordinates(Protocol):
    """Anything that can hand out coordinate arrays (a point or a grid)."""

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        ...


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., :, None] * b[..., None, :]


def axis_index(axis: Axis) -> int:
    """Map "x"/"y"/"z" (or 0/1/2) to an array index."""
    if isinstance(axis, str):
        if axis not in AXES:
            raise ValueError(f"Unknown axis: {axis!r}")
        return AXES.index(axis)
    if axis not in (0, 1, 2):
        raise ValueError(f"Unknown axis: {axis!r}")
    return int(axis)


@dataclass(frozen=True, eq=False)
class Jet2:
    """Value, gradient and Hessian of a scalar field at one or more points."""

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self) -> None:
        value = np.asarray(self.value, dtype=float)
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        if grad.shape[-1:] != (3,) or hess.shape[-2:] != (3, 3):
            raise ValueError(
                f"Bad jet shapes: grad {grad.shape}, hess {hess.shape}"
            )
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "grad", grad)
        # 0.5 * (H + H^T) returns a symmetric H unchanged, bit for bit.
        object.__setattr__(self, "hess", 0.5 * (hess + np.swapaxes(hess, -1, -2)))

    @classmethod
    def constant(cls, c: Union[float, np.ndarray]) -> "Jet2":
        value = np.asarray(c, dtype=float)
        return cls(value, np.zeros(value.shape + (3,)), np.zeros(value.shape + (3, 3)))

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(np.broadcast_shapes(self.value.shape, self.grad.shape[:-1], self.hess.shape[:-2]))

    def broadcast(self, shape: Tuple[int, ...]) -> "Jet2":
        """Expand to an explicit batch shape (copies)."""
        return Jet2(
            np.broadcast_to(self.value, shape).copy(),
            np.broadcast_to(self.grad, shape + (3,)).copy(),
            np.broadcast_to(self.hess, shape + (3, 3)).copy(),
        )

    def partial(self, axis: Axis) -> "Jet2":
        """Jet of a first partial derivative.

        Third derivatives are not carried, so the returned Hessian is zero;
        it is exact for fields of total degree at most two.
        """
        i = axis_index(axis)
        grad = self.grad[..., i]
        return Jet2(grad, self.hess[..., i, :], np.zeros(grad.shape + (3, 3)))

    def is_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.value))
            and np.all(np.isfinite(self.grad))
            and np.all(np.isfinite(self.hess))
        )

    def __add__(self, other: "JetLike") -> "Jet2":
        return jet_arith("add", self, other)

    def __radd__(self, other: "JetLike") -> "Jet2":
        return jet_arith("add", other, self)

    def __sub__(self, other: "JetLike") -> "Jet2":
        return jet_arith("sub", self, other)

    def __rsub__(self, other: "JetLike") -> "Jet2":
        return jet_arith("sub", other, self)

    def __mul__(self, other: "JetLike") -> "Jet2":
        return jet_arith("mul", self, other)

    def __rmul__(self, other: "JetLike") -> "Jet2":
        return jet_arith("mul", other, self)

    def __truediv__(self, other: "JetLike") -> "Jet2":
        return jet_arith("div", self, other)

    def __rtruediv__(self, other: "JetLike") -> "Jet2":
        return jet_arith("div", other, self)

    def __neg__(self) -> "Jet2":
        return jet_arith("neg", self)

    def __pos__(self) -> "Jet2":
        return self

    def __pow__(self, n: int) -> "Jet2":
        return jet_power(self, n)

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"


JetLike = Union[Jet2, float, int, np.ndarray]


def as_jet(a: JetLike) -> Jet2:
    """Promote numbers and plain arrays to constant jets."""
    if isinstance(a, Jet2):
        return a
    return Jet2.constant(a)


def jet_coordinate(axis: Axis, point: HasCoordinates) -> Jet2:
    """Jet of the coordinate function ``axis`` at ``point``."""
    i = axis_index(axis)
    value = np.asarray(point.coordinates()[i], dtype=float)
    grad = np.zeros(value.shape + (3,))
    grad[..., i] = 1.0
    return Jet2(value, grad, np.zeros(value.shape + (3, 3)))


def coordinate_jets(point: HasCoordinates) -> Tuple[Jet2, Jet2, Jet2]:
    return jet_coordinate("x", point), jet_coordinate("y", point), jet_coordinate("z", point)


def _reciprocal(b: Jet2, label: str) -> Jet2:
    zero = b.value == 0.0
    if np.any(zero):
        where = np.argwhere(np.atleast_1d(zero))[0].tolist()
        raise DomainError(f"Division by zero: {label} vanishes (batch index {where})")
    inv = 1.0 / b.value
    return _compose(b, inv, -inv * inv, 2.0 * inv * inv * inv)


def _compose(a: Jet2, f: np.ndarray, df: np.ndarray, d2f: np.ndarray) -> Jet2:
    """Chain rule through a scalar function with derivatives f, f', f'' at a.value."""
    df = np.asarray(df, dtype=float)
    d2f = np.asarray(d2f, dtype=float)
    grad = df[..., None] * a.grad
    hess = df[..., None, None] * a.hess + d2f[..., None, None] * _outer(a.grad, a.grad)
    return Jet2(f, grad, hess)


def jet_arith(
    op: ArithOp,
    a: JetLike,
    b: Optional[JetLike] = None,
    *,
    label: str = "denominator",
) -> Jet2:
    """Pointwise arithmetic on 2-jets (Leibniz rule for mul, quotient rule for div)."""
    a = as_jet(a)
    if op == "neg":
        return Jet2(-a.value, -a.grad, -a.hess)
    if b is None:
        raise ValueError(f"Operation {op!r} needs two operands")
    b = as_jet(b)

    if op == "add":
        return Jet2(a.value + b.value, a.grad + b.grad, a.hess + b.hess)
    if op == "sub":
        return Jet2(a.value - b.value, a.grad - b.grad, a.hess - b.hess)
    if op == "mul":
        value = a.value * b.value
        grad = a.value[..., None] * b.grad + b.value[..., None] * a.grad
        hess = (
            a.value[..., None, None] * b.hess
            + b.value[..., None, None] * a.hess
            + _outer(a.grad, b.grad)
            + _outer(b.grad, a.grad)
        )
        return Jet2(value, grad, hess)
    if op == "div":
        return jet_arith("mul", a, _reciprocal(b, label))
    raise ValueError(f"Unknown jet operation: {op!r}")


def jet_power(a: JetLike, n: int) -> Jet2:
    """Non-negative integer power."""
    a = as_jet(a)
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"Only non-negative integer powers are supported, got {n!r}")
    v = a.value
    f = v**n
    df = n * v ** (n - 1) if n >= 1 else np.zeros_like(v)
    d2f = n * (n - 1) * v ** (n - 2) if n >= 2 else np.zeros_like(v)
    return _compose(a, f, df, d2f)


def jet_elementary(fn: Elementary, a: JetLike) -> Jet2:
    """Apply sin or cos through the 2-jet chain rule."""
    a = as_jet(a)
    s, c = np.sin(a.value), np.cos(a.value)
    if fn == "sin":
        return _compose(a, s, c, -s)
    if fn == "cos":
        return _compose(a, c, -s, -c)
    raise ValueError(f"Unknown elementary function: {fn!r}")


def sin(a: JetLike) -> Jet2:
    return jet_elementary("sin", a)


def cos(a: JetLike) -> Jet2:
    return jet_elementary("cos", a)


FieldExpr = Callable[[Jet2, Jet2, Jet2], JetLike]


@dataclass(frozen=True)
class ScalarField:
    """A scalar field written as an expression over coordinate jets."""

    expr: FieldExpr
    name: str = "f"

    def __call__(self, point: HasCoordinates) -> Jet2:
        x, y, z = coordinate_jets(point)
        jet = as_jet(self.expr(x, y, z))
        return jet.broadcast(x.value.shape)

    @classmethod
    def constant(cls, c: float, name: str = "") -> "ScalarField":
        return cls(lambda x, y, z: float(c), name or f"{c:g}")

    @classmethod
    def zero(cls) -> "ScalarField":
        return cls.constant(0.0, "0")


def central_differences(
    field: ScalarField, point: HasCoordinates, h: float = FD_STEP
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian of ``field`` at a single point by central differences."""
    base = np.array([float(c) for c in point.coordinates()])

    def f(offset: np.ndarray) -> float:
        return float(field(_Coords(base + offset)).value)

    e = np.eye(3) * h
    value = f(np.zeros(3))
    grad = np.array([(f(e[i]) - f(-e[i])) / (2 * h) for i in range(3)])
    hess = np.empty((3, 3))
    for i in range(3):
        hess[i, i] = (f(e[i]) - 2 * value + f(-e[i])) / (h * h)
        for j in range(i + 1, 3):
            mixed = (
                f(e[i] + e[j]) - f(e[i] - e[j]) - f(-e[i] + e[j]) + f(-e[i] - e[j])
            ) / (4 * h * h)
            hess[i, j] = hess[j, i] = mixed
    return value, grad, hess


def finite_difference_error(
    field: ScalarField, point: HasCoordinates, h: float = FD_STEP
) -> float:
    """Largest jet-vs-difference discrepancy, relative to max(1, |value|)."""
    jet = field(point)
    _, grad, hess = central_differences(field, point, h)
    scale = max(1.0, abs(float(jet.value)))
    err = max(np.max(np.abs(jet.grad - grad)), np.max(np.abs(jet.hess - hess)))
    logger.debug(f"FD check for {field.name}: error {err:.3e} at scale {scale:.3e}")
    return float(err / scale)


@dataclass(frozen=True)
class _Coords:
    xyz: np.ndarray

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.xyz[0], self.xyz[1], self.xyz[2]
