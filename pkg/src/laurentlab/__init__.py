"""laurentlab: a symbolic workbench for lattice recurrences with the
Laurent property.

The package represents iterates of partial difference equations on
finitely generated abelian lattices as exact multivariate Laurent
polynomials over the integers with free parameters, and mechanically
checks Laurentness, irreducibility, and pairwise coprimality of the
computed iterates on light-cone regular domains.
"""

from .poly import Coeff, LaurentPoly, NotDivisibleError, VarId, exact_div, try_exact_div
from .textform import ParseError, format_poly, parse_poly

__all__ = [
    "Coeff",
    "LaurentPoly",
    "NotDivisibleError",
    "VarId",
    "exact_div",
    "try_exact_div",
    "ParseError",
    "format_poly",
    "parse_poly",
]

__version__ = "0.1.0"
