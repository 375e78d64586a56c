"""
Exact k-th power tests, Capelli irreducibility of T^k - t over Q, Weil
heights of rationals and the effective bound on k-th powers.

Over Q the only roots of unity are 1 and -1, so "t not a root of unity"
means t not in {0, 1, -1} throughout.
"""

import math
from fractions import Fraction
from itertools import product
from typing import Optional, Union

from sympy import binomial, integer_nthroot, nextprime, primefactors
from sympy.polys.densearith import dup_rem
from sympy.polys.domains import ZZ

from powerdiv.models.schemas import HeightValue
from powerdiv.utils.validation import RootOfUnity, ZeroValue

RationalLike = Union[Fraction, int]


def as_rational(t: RationalLike) -> Fraction:
    return t if isinstance(t, Fraction) else Fraction(t)


def weil_height(t: RationalLike) -> HeightValue:
    """
    Absolute logarithmic Weil height of a rational, h(a/b) = log max(|a|, b).

    The exact integer form is authoritative; the logarithm is advisory.
    """
    t = as_rational(t)
    exact_form = max(abs(t.numerator), t.denominator)
    return HeightValue(value=math.log(exact_form), exact_form=exact_form)


def _exact_root(n: int, k: int) -> Optional[int]:
    root, exact = integer_nthroot(n, k)
    return int(root) if exact else None


def kth_power_test(t: RationalLike, k: int) -> Optional[Fraction]:
    """
    Return x in Q with x^k = t, or None when t is not a k-th power.

    Args:
        t: The rational to test.
        k: Positive exponent.

    Returns:
        Optional[Fraction]: A k-th root (the positive one for even k).
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    t = as_rational(t)
    if t.numerator < 0 and k % 2 == 0:
        return None
    num = _exact_root(abs(t.numerator), k)
    den = _exact_root(t.denominator, k)
    if num is None or den is None:
        return None
    sign = -1 if t.numerator < 0 else 1
    return Fraction(sign * num, den)


def power_bound(t: RationalLike) -> int:
    """
    B = floor(h(t) / log 2): t is not a k-th power in Q for any k > B.

    Every rational x outside {0, 1, -1} has h(x) >= log 2 and h(x^k) = k h(x),
    so B is computed exactly as floor(log2(max(|a|, b))).
    """
    t = as_rational(t)
    if t == 0:
        raise ZeroValue("t = 0 is a k-th power for every k")
    if abs(t) == 1:
        raise RootOfUnity(f"t = {t} is a root of unity; its height is zero")
    return weil_height(t).exact_form.bit_length() - 1


def capelli_irreducible(t: RationalLike, k: int) -> bool:
    """
    Capelli's criterion for T^k - t over Q.

    Irreducible iff t is not a q-th power for every prime q | k and, when
    4 | k, t is not of the form -4c^4.
    """
    t = as_rational(t)
    if t == 0:
        raise ZeroValue("T^k - 0 = T^k is reducible for k >= 2")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    for q in primefactors(k):
        if kth_power_test(t, q) is not None:
            return False
    if k % 4 == 0 and kth_power_test(-t / 4, 4) is not None:
        return False
    return True


def minimal_irreducible_prime(t: RationalLike, degree_bound: int) -> int:
    """
    Smallest prime k1 > max(power_bound(t), degree_bound).

    Beyond the power bound T^k1 - t is irreducible over Q; exceeding the
    degree bound keeps Q(zeta_k1) disjoint from the field built so far.
    """
    return int(nextprime(max(power_bound(t), degree_bound)))


def brute_force_irreducible(t: int, k: int) -> bool:
    """
    Bounded-coefficient factorization oracle for T^k - t with integer t.

    A monic factor of degree d has roots of absolute value R = |t|^(1/k), so
    its i-th coefficient is bounded by C(d, i) * R^i. Every monic integer
    candidate of degree 1..k/2 within those bounds is tried by exact division.
    """
    if t == 0:
        return k == 1
    if k == 1:
        return True
    root, exact = integer_nthroot(abs(t), k)
    radius = int(root) if exact else int(root) + 1
    target = [ZZ(1)] + [ZZ(0)] * (k - 1) + [ZZ(-t)]
    for d in range(1, k // 2 + 1):
        bounds = [int(binomial(d, i)) * radius**i for i in range(1, d + 1)]
        ranges = [range(-b, b + 1) for b in bounds]
        for tail in product(*ranges):
            if tail[-1] == 0 or t % tail[-1] != 0:
                continue
            candidate = [ZZ(1)] + [ZZ(c) for c in tail]
            if not dup_rem(target, candidate, ZZ):
                return False
    return True
