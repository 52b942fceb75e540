"""Exact and numeric tools for Legendre transforms, dual curves and the T*P^n flop."""

from .errors import HKFlopError, InputError
from .exactpoly import HomogeneousPolynomial, Poly, parse

__version__ = "0.1.0"

__all__ = ["HKFlopError", "InputError", "HomogeneousPolynomial", "Poly", "parse", "__version__"]
