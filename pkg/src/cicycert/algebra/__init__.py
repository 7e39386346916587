from .fields import QQ, DEFAULT_PRIME, BigFloatField, FieldError, PrimeField, RationalField, field_from_json, random_prime
from .poly import (
    CurveError,
    HomForm,
    RationalCurve,
    UniPoly,
    compose_form_with_curve,
    divide_form,
    gcd_all,
    is_squarefree,
    jacobian_row,
    monomials,
    poly_gcd,
    squarefree_decomposition,
    variables,
)


def partial_derivative(g: HomForm, j: int) -> HomForm:
    return g.partial(j)


__all__ = [
    "QQ",
    "DEFAULT_PRIME",
    "BigFloatField",
    "CurveError",
    "FieldError",
    "HomForm",
    "PrimeField",
    "RationalCurve",
    "RationalField",
    "UniPoly",
    "compose_form_with_curve",
    "divide_form",
    "field_from_json",
    "gcd_all",
    "is_squarefree",
    "jacobian_row",
    "monomials",
    "partial_derivative",
    "poly_gcd",
    "random_prime",
    "squarefree_decomposition",
    "variables",
]
