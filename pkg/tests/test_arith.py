import random

import pytest
from pydantic import ValidationError as PydanticValidationError
from sympy import primerange

from powerdiv.core.arith import (
    compose_power,
    discriminant,
    divides,
    has_root_mod,
    has_root_mod_exhaustive,
    has_root_mod_gcd,
    poly_gcd_mod,
    rational_roots,
    reduce_mod,
    residues_have_root,
)
from powerdiv.core.parser import parse_poly
from powerdiv.models.polynomial import IntPoly, ModPoly


def mod(p, coeffs):
    return ModPoly.from_residues(p, coeffs)


class TestReduceAndCompose:
    def test_reduce_mod(self):
        assert reduce_mod(parse_poly("T^3 - 2"), 7).coeffs == (5, 0, 0, 1)
        assert reduce_mod(parse_poly("T - 2"), 2).coeffs == (0, 1)
        assert reduce_mod(parse_poly("T^2 + 10*T + 25"), 5).coeffs == (0, 0, 1)

    def test_compose_power(self):
        assert compose_power(parse_poly("T - 2"), 3) == parse_poly("T^3 - 2")
        P = parse_poly("T^2 - T - 1")
        assert compose_power(P, 1) == P
        assert compose_power(parse_poly("(T-2)*(T-3)"), 2).coeffs == (6, 0, -5, 0, 1)

    def test_compose_power_is_multiplicative(self):
        P = parse_poly("T^3 - 4*T + 7")
        for a, b in [(2, 3), (3, 5), (1, 4)]:
            assert compose_power(compose_power(P, a), b) == compose_power(P, a * b)

    def test_reduction_commutes_with_composition(self):
        P = parse_poly("T^2 - 3*T + 5")
        k, p = 4, 13
        reduced = reduce_mod(compose_power(P, k), p)
        for x in range(p):
            value = sum(c * pow(x, i, p) for i, c in enumerate(reduced.coeffs)) % p
            assert value == P.evaluate(pow(x, k, p)) % p

    def test_compose_rejects_zero(self):
        with pytest.raises(ValueError):
            compose_power(parse_poly("T - 2"), 0)


class TestRootExistence:
    def test_examples(self):
        assert has_root_mod(mod(7, [-2, 0, 0, 1])) is False
        assert has_root_mod(mod(5, [-2, 0, 0, 1])) is True
        for p in [2, 3, 101, 65537, 1000003]:
            assert has_root_mod(mod(p, [-2, 1])) is True

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            has_root_mod(mod(7, [7, 14]))

    def test_exhaustive_and_gcd_paths_agree(self):
        rng = random.Random(20240601)
        primes = list(primerange(2, 400)) + [1009, 4099, 65521]
        for _ in range(300):
            p = rng.choice(primes)
            degree = rng.randint(1, 6)
            coeffs = [rng.randrange(p) for _ in range(degree)] + [1]
            Q = mod(p, coeffs)
            assert has_root_mod_exhaustive(Q) == has_root_mod_gcd(Q), (p, coeffs)

    def test_threshold_paths_agree(self):
        rng = random.Random(7)
        for p in list(primerange(3, 200)):
            coeffs = [rng.randrange(p) for _ in range(4)] + [1]
            low = residues_have_root(mod(p, coeffs).coeffs, p, threshold=1 << 16)
            high = residues_have_root(mod(p, coeffs).coeffs, p, threshold=2, binomial_shortcut=False)
            assert low == high

    def test_binomial_shortcut_agrees_with_gcd(self):
        for p in primerange(3, 500):
            for n in (2, 3, 4, 5, 6, 12):
                for c in (2, 3, 5, p - 1):
                    residues = mod(p, [(-c) % p] + [0] * (n - 1) + [1]).coeffs
                    fast = residues_have_root(residues, p, threshold=2, binomial_shortcut=True)
                    slow = residues_have_root(residues, p, threshold=2, binomial_shortcut=False)
                    assert fast == slow, (p, n, c)

    def test_sparse_composition_scan(self):
        # P(T^12) is evaluated through x^12
        composed = compose_power(parse_poly("(T-2)*(T-3)*(T-5)"), 12)
        for p in primerange(7, 300):
            Q = reduce_mod(composed, p)
            assert has_root_mod_exhaustive(Q) == has_root_mod_gcd(Q), p

    def test_divides_strips_vanishing_leading_terms(self):
        # 7T + 1 is constant 1 mod 7
        assert divides((1, 7), 7) is False
        assert divides((-2, 0, 0, 1), 5) is True


class TestGcd:
    def test_examples(self):
        assert poly_gcd_mod(mod(5, [-1, 0, 1]), mod(5, [-1, 1])).coeffs == (4, 1)
        assert poly_gcd_mod(mod(7, [-2, 0, 0, 1]), mod(7, [-2, 0, 0, 1])).coeffs == (5, 0, 0, 1)
        assert poly_gcd_mod(mod(2, [1, 0, 1]), mod(2, [0, 1, 1])).coeffs == (1, 1)

    def test_moduli_must_match(self):
        with pytest.raises(ValueError):
            poly_gcd_mod(mod(5, [1, 1]), mod(7, [1, 1]))


class TestModPoly:
    @pytest.mark.parametrize("modulus", [9, 15, 1 << 20, 2**61 + 1])
    def test_composite_modulus_rejected(self, modulus):
        with pytest.raises(PydanticValidationError, match="not prime"):
            mod(modulus, [1, 1])

    def test_prime_modulus_accepted(self):
        assert mod(2**61 - 1, [-1, 1]).coeffs == (2**61 - 2, 1)


class TestRationalRoots:
    def test_all_rational(self):
        assert rational_roots(parse_poly("T^2 - 5*T + 6")) == ([2, 3], (1,))
        assert rational_roots(parse_poly("T^2 - T - 2")) == ([-1, 2], (1,))

    def test_irrational_cofactor(self):
        assert rational_roots(parse_poly("T^2 - 2")) == ([], (-2, 0, 1))
        roots, cofactor = rational_roots(parse_poly("(T-3)*(T^2+1)"))
        assert roots == [3]
        assert cofactor == (1, 0, 1)

    def test_zero_and_repeated_roots(self):
        roots, cofactor = rational_roots(parse_poly("T*(T+2)^2"))
        assert roots == [0, -2, -2]
        assert cofactor == (1,)


def test_discriminant_and_squarefree_flag():
    assert discriminant(parse_poly("T^2 - 5*T + 6")) == 1
    assert discriminant(parse_poly("T^3 - 2")) == -108
    assert parse_poly("(T-2)^2").squarefree is False
    assert IntPoly(coeffs=[-2, 0, 1]).squarefree is True
