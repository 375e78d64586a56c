"""
Finite groups given by Cayley tables: conjugacy classes, class powers,
generation by unions of classes and the (H2) search.

Element 0 is always the identity. ``table[a, b]`` is the index of a*b.
"""

import logging
from functools import cached_property, reduce
from itertools import combinations
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from sympy import factorint

from powerdiv.config.settings import settings
from powerdiv.models.schemas import ConjClass, H2Witness
from powerdiv.utils.validation import TooLarge, TrivialGroup, ValidationError

logger = logging.getLogger(__name__)


class FiniteGroup:
    """
    A finite group on element indices 0..n-1 with identity 0.

    Axioms are verified at construction: identity and inverses always,
    associativity on every triple up to the full-check limit and on a
    seeded random sample beyond it.
    """

    def __init__(
        self,
        table: Sequence[Sequence[int]],
        labels: Optional[Sequence[str]] = None,
        source: str = "table",
        name: str = "group",
    ):
        self.table = np.asarray(table, dtype=np.int64)
        self.order = int(self.table.shape[0]) if self.table.ndim == 2 else 0
        self.labels = list(labels) if labels is not None else None
        self.source = source
        self.name = name
        if self.order > settings.group_order_cap:
            raise TooLarge(f"group order {self.order} exceeds cap {settings.group_order_cap}")
        self._verify()
        self.table.setflags(write=False)

    def _verify(self) -> None:
        n = self.order
        T = self.table
        if n < 1 or T.shape != (n, n):
            raise ValidationError("Cayley table must be a non-empty square table", "table")
        if T.min() < 0 or T.max() >= n:
            raise ValidationError("Cayley table entries must be element indices", "table")
        ids = np.arange(n)
        if not (np.array_equal(T[0], ids) and np.array_equal(T[:, 0], ids)):
            raise ValidationError("element 0 must be the identity", "table")
        # Latin square rows and columns give unique inverses
        rows_ok = all(len(np.unique(T[i])) == n for i in range(n))
        cols_ok = all(len(np.unique(T[:, j])) == n for j in range(n))
        if not (rows_ok and cols_ok):
            raise ValidationError("Cayley table is not a Latin square (inverses fail)", "table")
        if n <= settings.group_full_check_limit:
            for a in range(n):
                if not np.array_equal(T[T[a]], T[a][T]):
                    raise ValidationError(f"associativity fails for a = {a}", "table")
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, settings.group_sample_checks))
            if not np.array_equal(T[T[a, b], c], T[a, T[b, c]]):
                raise ValidationError("associativity fails on a sampled triple", "table")

    def __repr__(self) -> str:
        return f"FiniteGroup(name={self.name!r}, order={self.order})"

    @cached_property
    def inverses(self) -> np.ndarray:
        return np.argmax(self.table == 0, axis=1)

    def power(self, g: int, a: int) -> int:
        """g^a by square-and-multiply on the table."""
        result, base = 0, g
        while a > 0:
            if a & 1:
                result = int(self.table[result, base])
            base = int(self.table[base, base])
            a >>= 1
        return result

    @cached_property
    def element_orders(self) -> List[int]:
        orders = []
        for g in range(self.order):
            x, n = g, 1
            while x != 0:
                x = int(self.table[x, g])
                n += 1
            orders.append(n)
        return orders

    def element_order(self, g: int) -> int:
        return self.element_orders[g]

    @cached_property
    def exponent(self) -> int:
        return reduce(lambda x, y: x * y // gcd(x, y), self.element_orders, 1)

    def conjugate_orbit(self, x: int) -> FrozenSet[int]:
        # g x g^-1 for every g
        return frozenset(int(v) for v in self.table[self.table[:, x], self.inverses])

    def relabel(self, perm: Sequence[int]) -> "FiniteGroup":
        """
        Isomorphic copy where old element i becomes perm[i].

        perm must fix 0 so the identity stays at index 0.
        """
        perm = np.asarray(perm, dtype=np.int64)
        if perm[0] != 0 or sorted(perm.tolist()) != list(range(self.order)):
            raise ValidationError("relabeling must be a permutation fixing 0", "perm")
        new = np.empty_like(self.table)
        new[np.ix_(perm, perm)] = perm[self.table]
        return FiniteGroup(new, source=self.source, name=f"{self.name} (relabeled)")


def conjugacy_classes(G: FiniteGroup) -> List[ConjClass]:
    """Partition of G into classes, sorted by (size, representative)."""
    seen: Set[int] = set()
    classes: List[ConjClass] = []
    for x in range(G.order):
        if x in seen:
            continue
        orbit = G.conjugate_orbit(x)
        seen |= orbit
        members = tuple(sorted(orbit))
        classes.append(ConjClass(representative=members[0], members=members))
    classes.sort(key=lambda c: (c.size, c.representative))
    return classes


def class_index(classes: Sequence[ConjClass]) -> Dict[int, int]:
    """Element index -> position of its class in the list."""
    return {g: i for i, c in enumerate(classes) for g in c.members}


def class_power(G: FiniteGroup, C: ConjClass, a: int, classes: Optional[Sequence[ConjClass]] = None) -> ConjClass:
    """The class containing g^a for g in C."""
    if a < 0:
        raise ValueError(f"exponent must be non-negative, got {a}")
    classes = classes if classes is not None else conjugacy_classes(G)
    target = G.power(C.representative, a)
    for c in classes:
        if target in c.members:
            return c
    raise AssertionError(f"element {target} lies in no conjugacy class")


def subgroup_closure(G: FiniteGroup, elements: Iterable[int]) -> FrozenSet[int]:
    """Subgroup generated by the given elements."""
    gens = np.array(sorted(set(elements)), dtype=np.int64)
    reached = np.zeros(G.order, dtype=bool)
    reached[0] = True
    frontier = np.array([0], dtype=np.int64)
    while gens.size and frontier.size:
        products = np.unique(G.table[np.ix_(frontier, gens)])
        frontier = products[~reached[products]]
        reached[frontier] = True
    return frozenset(int(i) for i in np.flatnonzero(reached))


def generates(G: FiniteGroup, classes: Iterable[ConjClass]) -> bool:
    """True iff the union of the classes generates G."""
    union = {g for c in classes for g in c.members}
    return len(subgroup_closure(G, union)) == G.order


def union_of_conjugates(G: FiniteGroup, H: Iterable[int]) -> FrozenSet[int]:
    """Union of g H g^-1 over all g in G."""
    out: Set[int] = set()
    for h in set(H):
        out |= G.conjugate_orbit(h)
    return frozenset(out)


def is_cyclic_p_group(G: FiniteGroup) -> bool:
    """True iff |G| is a prime power and some element has order |G|."""
    if len(factorint(G.order)) != 1:
        return False
    return G.order in G.element_orders


def _power_classes(G: FiniteGroup, classes: Sequence[ConjClass], index: Dict[int, int], i: int) -> Set[int]:
    rep = classes[i].representative
    return {index[G.power(rep, a)] for a in range(1, G.exponent + 1)}


def h2_check(G: FiniteGroup) -> H2Witness:
    """
    Search for non-trivial classes C, C1..Cr with C1 u ... u Cr generating G
    and C different from every power class Ci^a.

    Candidate generating sets are enumerated by increasing r, lexicographic
    in class order. A superset of a generating set can only enlarge the set
    of power classes, so only sets whose proper subsets all fail to generate
    are tried.
    """
    if G.order == 1:
        raise TrivialGroup("condition (H2) needs a non-trivial group")
    classes = conjugacy_classes(G)
    index = class_index(classes)
    nontrivial = list(range(1, len(classes)))
    powers = {i: _power_classes(G, classes, index, i) for i in nontrivial}

    non_generating: Set[Tuple[int, ...]] = {()}
    level: List[Tuple[int, ...]] = [()]
    for r in range(1, len(nontrivial) + 1):
        candidates = []
        for base in level:
            start = base[-1] + 1 if base else 1
            for i in range(start, len(classes)):
                combo = base + (i,)
                if all(sub in non_generating for sub in combinations(combo, r - 1)):
                    candidates.append(combo)
        next_level = []
        for combo in candidates:
            chosen = [classes[i] for i in combo]
            if not generates(G, chosen):
                non_generating.add(combo)
                next_level.append(combo)
                continue
            reached = set().union(*(powers[i] for i in combo))
            for c in nontrivial:
                if c not in reached:
                    logger.debug("(H2) holds for %s with C=%d, generators=%s", G.name, c, combo)
                    return H2Witness(verdict="holds", C=classes[c], generating_classes=chosen)
        if not next_level:
            break
        level = next_level
    return H2Witness(verdict="fails")
