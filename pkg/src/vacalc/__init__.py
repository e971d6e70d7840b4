"""vacalc: exact lambda-bracket calculus for vertex algebras.

The package bundles OPE tables for the type-A W-algebras of rank up to
four and for the two-parameter algebra of type W(2,3,4,...), together
with verification suites (Jacobi identities, conformal data, embedding
homomorphisms, Shapovalov determinants, character identities).
"""

from .scalar import (DivisionByZero, PoleAtPoint, RatQ, Scalar,
                     equal_up_to_constant, linear_factor_decompose,
                     parse_scalar)
from .expr import GeneratorDecl, InhomogeneousState, LatticeDecl, State
from .bracket import (LambdaPoly, MissingBracket, deriv, lambda_bracket,
                      normal_form, nprod, nth_product, weight_of)
from .registry import (AlgebraDef, HomMap, UnknownBuiltin, ValidationError,
                       builtin_algebra, builtin_ids, parse_vadef, parse_vamap,
                       serialize, specialize_param, tensor)

__all__ = [
    "AlgebraDef", "DivisionByZero", "GeneratorDecl", "HomMap",
    "InhomogeneousState", "LambdaPoly", "LatticeDecl", "MissingBracket",
    "PoleAtPoint", "RatQ", "Scalar", "State", "UnknownBuiltin",
    "ValidationError", "builtin_algebra", "builtin_ids", "deriv",
    "equal_up_to_constant", "lambda_bracket", "linear_factor_decompose",
    "normal_form", "nprod", "nth_product", "parse_scalar", "parse_vadef",
    "parse_vamap", "serialize", "specialize_param", "tensor", "weight_of",
]

__version__ = "0.1.0"
