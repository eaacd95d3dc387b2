"""Closed-form soliton families package."""

from .base import SolitonFamily
from .bundle import BalancedFamily, Case1bForm, FlatBaseFamily
from .minkowski import MinkowskiFamily
from .product import ProductFamily

FAMILIES = {
    "1a": FlatBaseFamily(),
    "1b": BalancedFamily(),
    "2": ProductFamily(),
    "3": MinkowskiFamily(),
}


def get_family(label: str) -> SolitonFamily:
    """Look up a family by case label."""
    try:
        return FAMILIES[label]
    except KeyError:
        raise ValueError(f"Unknown soliton case: {label}") from None


__all__ = [
    "FAMILIES",
    "BalancedFamily",
    "Case1bForm",
    "FlatBaseFamily",
    "MinkowskiFamily",
    "ProductFamily",
    "SolitonFamily",
    "get_family",
]
