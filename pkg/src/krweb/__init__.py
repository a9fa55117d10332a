"""Exact sl(N) Khovanov-Rozansky link homology via web compilation."""

from .poly import Polynomial, Variable, var, divide_exact, div_without_remainder
from .laurent import LaurentPoly2

__all__ = [
    "Polynomial",
    "Variable",
    "var",
    "divide_exact",
    "div_without_remainder",
    "LaurentPoly2",
]

__version__ = "0.1.0"
