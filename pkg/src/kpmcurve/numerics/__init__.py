"""Precision-parametric numerical engines shared by the curve pipeline."""
from .jets import Jet3, jet_derivative, jet_exp, jet_log, jet_mul, jet_reciprocal
from .laurent import laurent_coefficients
from .paths import ArcSegment, LineSegment, PathSegment, circle
from .precision import EXTENDED, STANDARD, Precision, gauss_legendre, get_precision
from .quadrature import QuadratureError, adaptive_gauss, integrate_interval
from .roots import RootFindingError, poly_from_roots, solve_polynomial

__all__ = [
    "ArcSegment", "EXTENDED", "Jet3", "LineSegment", "PathSegment", "Precision",
    "QuadratureError", "RootFindingError", "STANDARD", "adaptive_gauss", "circle",
    "gauss_legendre", "get_precision", "integrate_interval", "jet_derivative", "jet_exp",
    "jet_log", "jet_mul", "jet_reciprocal", "laurent_coefficients", "poly_from_roots",
    "solve_polynomial",
]
