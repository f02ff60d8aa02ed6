"""Exact symbolic arithmetic: parsing, rational functions and radical towers."""

from .poly import Polynomial, RationalFunction, Space, rf_sum, space
from .syntax import evaluate, identifiers, parse, rational, to_rational
from .tower import ExtensionElement, RadicalTower, differentiate, is_zero, substitute

__all__ = [
    "ExtensionElement",
    "Polynomial",
    "RadicalTower",
    "RationalFunction",
    "Space",
    "differentiate",
    "evaluate",
    "identifiers",
    "is_zero",
    "parse",
    "rational",
    "rf_sum",
    "space",
    "substitute",
    "to_rational",
]
