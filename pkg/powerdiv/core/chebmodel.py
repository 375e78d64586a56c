"""
Exact permutation models of Gal(T^k - t / Q) on the k roots of T^k - t.

Supported cases:
  * k an odd prime, t squarefree with |t| >= 2: the full metacyclic group
    {j -> b*j + a mod k : a in Z/k, b in (Z/k)^*} of order k(k-1);
  * k = 2, t not a square with |t| >= 2: the swap of the two roots.

Anything else raises UnsupportedCase, so callers fall back to sieve-only
mode instead of emitting a prediction that rests on an unproved degree.
"""

import logging
from fractions import Fraction
from typing import List, Tuple

from sympy import factorint, isprime, totient
from sympy.combinatorics import Permutation, PermutationGroup

from powerdiv.core.powers import capelli_irreducible, kth_power_test
from powerdiv.models.schemas import ModelPrediction, PermGroupModel, ValidityChecks
from powerdiv.utils.validation import UnsupportedCase

logger = logging.getLogger(__name__)

Perm = Tuple[int, ...]


def _is_squarefree(t: int) -> bool:
    return all(e == 1 for e in factorint(abs(t)).values())


def _affine_maps(k: int) -> List[Perm]:
    return [tuple((b * j + a) % k for j in range(k)) for b in range(1, k) for a in range(k)]


def _compose(f: Perm, g: Perm) -> Perm:
    return tuple(f[x] for x in g)


def group_axioms_hold(elements: List[Perm]) -> bool:
    """Closure, identity and inverses, checked exhaustively."""
    if not elements:
        return False
    present = set(elements)
    identity = tuple(range(len(elements[0])))
    if identity not in present:
        return False
    for f in elements:
        inverse = tuple(sorted(range(len(f)), key=lambda x: f[x]))
        if inverse not in present:
            return False
        for g in elements:
            if _compose(f, g) not in present:
                return False
    return True


def is_transitive(elements: List[Perm]) -> bool:
    group = PermutationGroup([Permutation(list(e)) for e in elements])
    return group.is_transitive()


def build_model(t: int, k: int) -> PermGroupModel:
    """
    Permutation model of the Galois group of T^k - t on root indices.

    Args:
        t: Integer with |t| >= 2.
        k: 2, or an odd prime with t squarefree.

    Returns:
        PermGroupModel: Elements plus the recorded hypotheses.
    """
    if abs(t) < 2:
        raise UnsupportedCase(f"no exact model for |t| <= 1 (t = {t})")
    if not isprime(k):
        raise UnsupportedCase(f"no exact model for composite k = {k}")

    capelli = capelli_irreducible(t, k)
    squarefree = _is_squarefree(t)
    if k == 2:
        if kth_power_test(t, 2) is not None:
            raise UnsupportedCase(f"t = {t} is a square; T^2 - t splits over Q")
        elements = [(0, 1), (1, 0)]
        provenance, expected = "cyclic-kummer", 2
    else:
        if not squarefree:
            raise UnsupportedCase(f"t = {t} is not squarefree; the metacyclic degree is not guaranteed")
        elements = _affine_maps(k)
        provenance, expected = "metacyclic-full", k * (k - 1)

    checks = ValidityChecks(
        capelli_irreducible=capelli,
        squarefree=squarefree,
        expected_order=expected,
        order_divides_k_phi_k=(k * int(totient(k))) % len(elements) == 0,
        group_axioms=group_axioms_hold(elements),
        transitive=is_transitive(elements),
    )
    if not (checks.capelli_irreducible and checks.group_axioms and checks.transitive
            and len(elements) == expected and checks.order_divides_k_phi_k):
        raise UnsupportedCase(f"model checks failed for (t={t}, k={k}): {checks.model_dump()}")
    logger.debug("Built %s model of order %d for T^%d - %d", provenance, len(elements), k, t)
    return PermGroupModel(t=t, k=k, provenance=provenance, elements=elements, validity_checks=checks)


def count_fixed_point_free(elements: List[Perm]) -> int:
    """Brute-force count of permutations without a fixed point."""
    return sum(1 for e in elements if all(e[j] != j for j in range(len(e))))


def affine_fpf_census(k: int) -> Fraction:
    """
    Fixed-point-free fraction of the affine group mod a prime k by census.

    j -> b*j + a has a fixed point iff (b - 1) j = -a is solvable: always
    when b != 1, and only for a = 0 when b = 1.
    """
    fpf = 0
    for b in range(1, k):
        for a in range(k):
            solutions = (k if a == 0 else 0) if b == 1 else 1
            if solutions == 0:
                fpf += 1
    return Fraction(fpf, k * (k - 1))


def fpf_fraction(model: PermGroupModel) -> ModelPrediction:
    """Exact proportion of model elements fixing no root."""
    fraction = Fraction(count_fixed_point_free(model.elements), model.order)
    return ModelPrediction(t=model.t, k=model.k, fpf_fraction=fraction)
