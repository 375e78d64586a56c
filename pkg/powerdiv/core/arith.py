"""
Exact integer, modular and polynomial kernels.

Hot loops work on plain tuples of residues (lowest degree first); the
public operations wrap them in IntPoly / ModPoly.
"""

from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sympy import divisors
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_gcd, gf_pow_mod, gf_sub

from powerdiv.config.settings import settings
from powerdiv.models.polynomial import IntPoly, ModPoly

# T as a dense galoistools polynomial
_GF_T = [ZZ(1), ZZ(0)]


def reduce_mod(P: IntPoly, p: int) -> ModPoly:
    """Reduce the coefficients of P into [0, p)."""
    return ModPoly.from_residues(p, P.coeffs)


def compose_power(P: IntPoly, k: int) -> IntPoly:
    """Return P(T^k)."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k == 1:
        return P
    return IntPoly(coeffs=compose_coeffs(P.coeffs, k))


def compose_coeffs(coeffs: Sequence[int], k: int) -> Tuple[int, ...]:
    composed = [0] * ((len(coeffs) - 1) * k + 1)
    for i, c in enumerate(coeffs):
        composed[i * k] = c
    return tuple(composed)


def discriminant(P: IntPoly) -> int:
    """Exact discriminant, the resultant of P and P' up to sign (subresultant chain)."""
    return int(P.to_sympy().discriminant())


def poly_gcd_mod(A: ModPoly, B: ModPoly) -> ModPoly:
    """Monic gcd of A and B in F_p[T]."""
    if A.prime != B.prime:
        raise ValueError(f"moduli differ: {A.prime} and {B.prime}")
    if A.is_zero and B.is_zero:
        raise ValueError("gcd of two zero polynomials is undefined")
    p = A.prime
    g = gf_gcd([ZZ(c) for c in A.to_dense()], [ZZ(c) for c in B.to_dense()], p, ZZ)
    return ModPoly.from_dense(p, g)


def _exponent_stride(coeffs: Sequence[int]) -> int:
    """Largest g with Q(T) = R(T^g)."""
    stride = 0
    for i, c in enumerate(coeffs):
        if c:
            stride = gcd(stride, i)
    return stride or 1


def _powmod_array(xs: np.ndarray, e: int, p: int) -> np.ndarray:
    result = np.ones_like(xs)
    base = xs.copy()
    while e:
        if e & 1:
            result = (result * base) % p
        base = (base * base) % p
        e >>= 1
    return result


def _roots_exhaustive(coeffs: Sequence[int], p: int) -> bool:
    xs = np.arange(p, dtype=np.int64)
    stride = _exponent_stride(coeffs)
    if stride > 1:
        # P(T^k) is evaluated as R(x^k)
        xs = np.unique(_powmod_array(xs, stride, p))
        coeffs = coeffs[::stride]
    acc = np.zeros(len(xs), dtype=np.int64)
    for c in reversed(coeffs):
        acc = (acc * xs + c) % p
    return bool((acc == 0).any())


def _roots_gcd(coeffs: Sequence[int], p: int) -> bool:
    dense = [ZZ(c) for c in reversed(coeffs)]
    frobenius = gf_pow_mod(_GF_T, p, dense, p, ZZ)
    g = gf_gcd(gf_sub(frobenius, _GF_T, p, ZZ), dense, p, ZZ)
    return len(g) > 1


def _binomial_parts(coeffs: Sequence[int]) -> Optional[Tuple[int, int, int]]:
    """(a, n, b) when the residues describe a*T^n + b, else None."""
    n = len(coeffs) - 1
    if n < 2 or any(coeffs[1:n]):
        return None
    return coeffs[n], n, coeffs[0]


def _roots_binomial(a: int, n: int, b: int, p: int) -> bool:
    if b == 0:
        return True
    c = (-b * pow(a, -1, p)) % p
    return pow(c, (p - 1) // gcd(n, p - 1), p) == 1


def residues_have_root(
    coeffs: Sequence[int],
    p: int,
    threshold: Optional[int] = None,
    binomial_shortcut: Optional[bool] = None,
) -> bool:
    """
    Root existence for residues already reduced mod p, trailing zeros stripped.

    Below the threshold every x in [0, p) is evaluated; above it the degree
    of gcd(T^p - T, Q) decides, with the power-residue criterion standing in
    for binomials a*T^n + b when the shortcut is enabled.
    """
    degree = len(coeffs) - 1
    if degree < 1:
        return False
    if degree == 1 or coeffs[0] == 0:
        return True
    threshold = settings.root_scan_threshold if threshold is None else threshold
    if p < threshold and p * p < 1 << 62:
        return _roots_exhaustive(coeffs, p)
    shortcut = settings.binomial_shortcut if binomial_shortcut is None else binomial_shortcut
    if shortcut:
        parts = _binomial_parts(coeffs)
        if parts is not None:
            return _roots_binomial(*parts, p)
    return _roots_gcd(coeffs, p)


def has_root_mod(
    Q: ModPoly,
    threshold: Optional[int] = None,
    binomial_shortcut: Optional[bool] = None,
) -> bool:
    """True iff Q has a root in F_p."""
    if Q.is_zero:
        raise ValueError("root existence is undefined for the zero polynomial")
    return residues_have_root(Q.coeffs, Q.prime, threshold, binomial_shortcut)


def has_root_mod_exhaustive(Q: ModPoly) -> bool:
    return Q.degree >= 1 and _roots_exhaustive(Q.coeffs, Q.prime)


def has_root_mod_gcd(Q: ModPoly) -> bool:
    return Q.degree >= 1 and _roots_gcd(Q.coeffs, Q.prime)


def divides(coeffs: Sequence[int], p: int, threshold: Optional[int] = None,
            binomial_shortcut: Optional[bool] = None) -> bool:
    """True iff p is a prime divisor of the integer polynomial with these coefficients."""
    residues = [c % p for c in coeffs]
    while residues and residues[-1] == 0:
        residues.pop()
    return residues_have_root(residues, p, threshold, binomial_shortcut)


def _synthetic_divide(coeffs: Sequence[int], root: int) -> Tuple[Tuple[int, ...], int]:
    """Divide by (T - root); returns (quotient, remainder), lowest degree first."""
    quotient = [0] * (len(coeffs) - 1)
    carry = 0
    for i in range(len(coeffs) - 1, 0, -1):
        carry = carry * root + coeffs[i]
        quotient[i - 1] = carry
    return tuple(quotient), carry * root + coeffs[0]


def rational_roots(P: IntPoly) -> Tuple[List[int], Tuple[int, ...]]:
    """
    Rational roots of monic P with multiplicity, and the exact cofactor
    (coefficients, lowest degree first; (1,) when every root is rational).

    Rational roots of a monic integer polynomial are integers dividing the
    lowest nonzero coefficient, so a divisor scan finds them all.
    """
    coeffs: Tuple[int, ...] = P.coeffs
    roots: List[int] = []
    while len(coeffs) > 1 and coeffs[0] == 0:
        roots.append(0)
        coeffs = coeffs[1:]
    if len(coeffs) > 1:
        for d in divisors(abs(coeffs[0])):
            for candidate in (-d, d):
                while len(coeffs) > 1:
                    quotient, remainder = _synthetic_divide(coeffs, candidate)
                    if remainder != 0:
                        break
                    roots.append(candidate)
                    coeffs = quotient
    roots.sort(key=lambda r: (abs(r), r))
    return roots, coeffs
