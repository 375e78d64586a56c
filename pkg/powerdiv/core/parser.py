"""
Polynomial text syntax.

Two forms are accepted everywhere a polynomial is read: a coefficient list
``[c0, c1, ..., 1]`` (lowest degree first) or an expression in the single
variable ``T`` with integer coefficients, ``^`` or ``**`` powers, products
and parentheses, e.g. ``T^3 - 2`` or ``(T-2)*(T-3)``.
"""

import json
import re
from typing import Sequence, Union

from pydantic import ValidationError as PydanticValidationError
from sympy import Poly, PolynomialError, SympifyError
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)

from powerdiv.models.polynomial import T, IntPoly
from powerdiv.utils.validation import ValidationError

_EXPRESSION_CHARS = re.compile(r"^[0-9T\s+\-*^()]+$")
_TRANSFORMATIONS = standard_transformations + (implicit_multiplication, convert_xor)


def poly_from_coeffs(coeffs: Sequence[int], field: str = "poly") -> IntPoly:
    try:
        return IntPoly(coeffs=coeffs)
    except (PydanticValidationError, TypeError, ValueError) as e:
        raise ValidationError(f"invalid polynomial coefficients {list(coeffs)!r}: {e}", field)


def parse_poly(text: Union[str, Sequence[int]], field: str = "poly") -> IntPoly:
    """
    Parse polynomial text into an IntPoly.

    Args:
        text: Coefficient list (as a list or its JSON text) or an expression in T.
        field: Flag name reported in errors.

    Returns:
        IntPoly: The parsed monic polynomial.
    """
    if not isinstance(text, str):
        return poly_from_coeffs(list(text), field)

    stripped = text.strip()
    if stripped.startswith("["):
        try:
            coeffs = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise ValidationError(f"malformed coefficient list {text!r}: {e.msg}", field)
        if not isinstance(coeffs, list) or not all(isinstance(c, int) for c in coeffs):
            raise ValidationError(f"coefficient list must hold integers: {text!r}", field)
        return poly_from_coeffs(coeffs, field)

    if not stripped or not _EXPRESSION_CHARS.match(stripped):
        raise ValidationError(f"unsupported characters in polynomial {text!r}", field)
    try:
        expr = parse_expr(stripped, local_dict={"T": T}, transformations=_TRANSFORMATIONS)
        poly = Poly(expr, T)
    except (SympifyError, SyntaxError, TypeError, PolynomialError) as e:
        raise ValidationError(f"cannot parse polynomial {text!r}: {e}", field)

    if not poly.domain.is_ZZ:
        raise ValidationError(f"polynomial must have integer coefficients: {text!r}", field)
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    return poly_from_coeffs(coeffs, field)


def poly_to_text(P: IntPoly) -> str:
    """Canonical rendering, highest degree first, e.g. ``T^2 - 5*T + 6``."""
    return str(P)
