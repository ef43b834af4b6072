"""Exact polynomial arithmetic over the Gaussian rationals."""

from .algebra import (
    ExactDivisionError,
    divide_exact,
    divides,
    gcd_many,
    gcd_poly,
    prem,
    resultant,
    squarefree_part,
    sylvester_matrix,
)
from .gaussrat import I, ONE, ZERO, GaussRat, as_gaussrat
from .multipoly import (
    HomogeneityCheck,
    MultiPoly,
    NumPoly,
    check_homogeneous,
    default_names,
    dehomogenize,
    evaluate_exact,
    evaluate_num,
    homogenize,
    linear_form,
    partial_derivative,
)
from .parser import ParseError, parse_gaussrat, parse_poly, render_poly
from .roots import as_univariate, from_univariate, squarefree_decomposition, ugcd, univariate_roots

__all__ = [
    "ExactDivisionError",
    "GaussRat",
    "HomogeneityCheck",
    "I",
    "MultiPoly",
    "NumPoly",
    "ONE",
    "ParseError",
    "ZERO",
    "as_gaussrat",
    "as_univariate",
    "from_univariate",
    "check_homogeneous",
    "default_names",
    "dehomogenize",
    "divide_exact",
    "divides",
    "evaluate_exact",
    "evaluate_num",
    "gcd_many",
    "gcd_poly",
    "homogenize",
    "linear_form",
    "parse_gaussrat",
    "parse_poly",
    "partial_derivative",
    "prem",
    "render_poly",
    "resultant",
    "squarefree_decomposition",
    "squarefree_part",
    "sylvester_matrix",
    "ugcd",
    "univariate_roots",
]
