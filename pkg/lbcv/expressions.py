"""Parse frame-component expressions such as "x*y + sin(2*z)" into scalar fields.

Only numbers, the names x, y, z, the operators + - * / ** (non-negative
integer exponents), unary minus and the functions sin and cos are accepted.
The expression tree is checked node by node; nothing is passed to eval.
"""

from __future__ import annotations

import ast
import operator
from typing import Callable, Dict

from lbcv.errors import ConfigError
from lbcv.jets import Jet2, JetLike, ScalarField, cos, jet_power, sin
from lbcv.models import VectorField

_BINARY: Dict[type, Callable[[JetLike, JetLike], JetLike]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}
_FUNCTIONS = {"sin": sin, "cos": cos}
_NAMES = ("x", "y", "z")


def _check(node: ast.AST, source: str) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, source)
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ConfigError(f"Only numeric literals are allowed in {source!r}")
    elif isinstance(node, ast.Name):
        if node.id not in _NAMES:
            raise ConfigError(f"Unknown name {node.id!r} in {source!r} (use x, y, z)")
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ConfigError(f"Unsupported unary operator in {source!r}")
        _check(node.operand, source)
    elif isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exponent = node.right
            if not (
                isinstance(exponent, ast.Constant)
                and isinstance(exponent.value, int)
                and not isinstance(exponent.value, bool)
                and exponent.value >= 0
            ):
                raise ConfigError(f"Exponents must be non-negative integer literals in {source!r}")
        elif type(node.op) not in _BINARY:
            raise ConfigError(f"Unsupported operator in {source!r}")
        _check(node.left, source)
        _check(node.right, source)
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCTIONS):
            raise ConfigError(f"Only sin and cos may be called in {source!r}")
        if len(node.args) != 1 or node.keywords:
            raise ConfigError(f"{node.func.id} takes exactly one argument in {source!r}")
        _check(node.args[0], source)
    else:
        raise ConfigError(f"Unsupported syntax {type(node).__name__} in {source!r}")


def _evaluate(node: ast.AST, env: Dict[str, Jet2]) -> JetLike:
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.UnaryOp):
        value = _evaluate(node.operand, env)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp):
        left = _evaluate(node.left, env)
        if isinstance(node.op, ast.Pow):
            return jet_power(left, node.right.value)  # type: ignore[attr-defined]
        return _BINARY[type(node.op)](left, _evaluate(node.right, env))
    if isinstance(node, ast.Call):
        return _FUNCTIONS[node.func.id](_evaluate(node.args[0], env))  # type: ignore[attr-defined]
    raise ConfigError(f"Unsupported syntax {type(node).__name__}")


def parse_scalar(source: str, name: str = "f") -> ScalarField:
    """Compile one expression in x, y, z."""
    text = source.strip()
    if not text:
        raise ConfigError("Empty field expression")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as e:
        raise ConfigError(f"Cannot parse field expression {text!r}: {e.msg}") from e
    _check(tree, text)
    body = tree.body
    return ScalarField(lambda x, y, z: _evaluate(body, {"x": x, "y": y, "z": z}), name)


def parse_field(source: str) -> VectorField:
    """Compile "X1; X2; X3" into frame components."""
    parts = source.split(";")
    if len(parts) != 3:
        raise ConfigError(f"A field needs three ';'-separated components, got {len(parts)}")
    return VectorField(*(parse_scalar(p, f"X{i}") for i, p in enumerate(parts, start=1)))
