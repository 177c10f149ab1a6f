"""Symbolic-numeric toolkit for bivariate polynomials with no zeros on the bidisk."""

__version__ = "0.1.0"

from .scalars import EXACT, FLOAT, GaussianRational, BackendMismatch, rational
from .errors import BidiskError, FormatError, PreconditionError, CrossCheckError
from .polycore import (BivPoly, UniPoly, MPoly, HomogExpansion, reflect, flip2,
                       gcd, homog_expand, homog_divide, translate, resultant_z2,
                       to_json_dict, from_json_dict, INF_ORDER)

__all__ = [
    "EXACT", "FLOAT", "GaussianRational", "BackendMismatch", "rational",
    "BidiskError", "FormatError", "PreconditionError", "CrossCheckError",
    "BivPoly", "UniPoly", "MPoly", "HomogExpansion", "reflect", "flip2",
    "gcd", "homog_expand", "homog_divide", "translate", "resultant_z2",
    "to_json_dict", "from_json_dict", "INF_ORDER",
]
