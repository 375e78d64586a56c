"""
Parametric catalog of finite groups and the group text syntax.

Specs look like ``cyclic:12``, ``symmetric:4``, ``quaternion:8``,
``elementary_abelian:2:3`` (or ``elementary_abelian:8``) and products
``cyclic:12 x cyclic:2``. Permutation generators use 1-based cycle
notation, e.g. ``"(1 2)(3 4)"``.
"""

import json
import re
from math import factorial
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime
from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import AlternatingGroup, DihedralGroup, SymmetricGroup

from powerdiv.config.settings import settings
from powerdiv.core.groups import FiniteGroup
from powerdiv.utils.validation import TooLarge, UnknownGroup, ValidationError

_CYCLE = re.compile(r"\(([^()]*)\)")
_CYCLE_NOTATION = re.compile(r"^\s*(\([0-9,\s]*\)\s*)+$")

# Regular representation of Q8 on {1, i, -1, -i, j, k, -j, -k}
_Q8_GENERATORS = ["(1 2 3 4)(5 6 7 8)", "(1 5 3 7)(2 8 4 6)"]


def _check_order(order: int) -> None:
    if order > settings.group_order_cap:
        raise TooLarge(f"group order {order} exceeds cap {settings.group_order_cap}")


def parse_cycles(text: str, degree: int = 0) -> Permutation:
    """
    Parse 1-based cycle notation into a sympy Permutation on 0..degree-1.

    Args:
        text: Cycles such as "(1 2)(3 4)"; "()" is the identity.
        degree: Minimum number of points.
    """
    if not _CYCLE_NOTATION.match(text):
        raise ValidationError(f"malformed cycle notation {text!r}", "perms")
    cycles = []
    for body in _CYCLE.findall(text):
        points = [int(x) - 1 for x in re.split(r"[,\s]+", body.strip()) if x]
        if any(x < 0 for x in points) or len(set(points)) != len(points):
            raise ValidationError(f"invalid cycle ({body}) in {text!r}", "perms")
        if len(points) > 1:
            cycles.append(points)
    size = max([degree] + [max(c) + 1 for c in cycles])
    return Permutation(cycles, size=max(size, 1))


def from_permutations(perms: Sequence[Permutation], name: str = "group") -> FiniteGroup:
    """
    Close permutation generators into a Cayley table.

    Elements are sorted by array form, so the identity comes first, and
    table[i, j] is the index of g_i o g_j (g_j applied first).
    """
    degree = max(p.size for p in perms)
    group = PermutationGroup([Permutation(p.array_form, size=degree) for p in perms])
    _check_order(int(group.order()))
    forms = np.array(sorted(p.array_form for p in group.elements), dtype=np.int64)
    lookup = {row.tobytes(): i for i, row in enumerate(forms)}
    n = len(forms)
    table = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        composed = forms[i][forms]
        table[i] = [lookup[row.tobytes()] for row in composed]
    labels = [str(Permutation(list(row))) for row in forms]
    return FiniteGroup(table, labels=labels, source="permutation generators", name=name)


def from_cycles(generators: Sequence[str], name: str = "") -> FiniteGroup:
    perms = [parse_cycles(text) for text in generators] or [Permutation([0])]
    return from_permutations(perms, name=name or "<" + ", ".join(generators) + ">")


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise UnknownGroup(f"cyclic group needs n >= 1, got {n}", "group")
    _check_order(n)
    ids = np.arange(n)
    return FiniteGroup(np.add.outer(ids, ids) % n, name=f"C{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n."""
    if n < 1:
        raise UnknownGroup(f"dihedral group needs n >= 1, got {n}", "group")
    _check_order(2 * n)
    if n < 3:
        # sympy realizes D1, D2 on too few points for a faithful table
        return cyclic(2) if n == 1 else direct_product(cyclic(2), cyclic(2), name="D2")
    return from_permutations(DihedralGroup(n).generators, name=f"D{n}")


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise UnknownGroup(f"symmetric groups are cataloged for 1 <= n <= 6, got {n}", "group")
    if n == 1:
        return cyclic(1)
    return from_permutations(SymmetricGroup(n).generators, name=f"S{n}")


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= 6:
        raise UnknownGroup(f"alternating groups are cataloged for 1 <= n <= 6, got {n}", "group")
    if n < 3:
        return cyclic(1)
    return from_permutations(AlternatingGroup(n).generators, name=f"A{n}")


def quaternion(order: int = 8) -> FiniteGroup:
    if order != 8:
        raise UnknownGroup(f"only the quaternion group of order 8 is cataloged, got {order}", "group")
    group = from_cycles(_Q8_GENERATORS, name="Q8")
    return group


def elementary_abelian(p: int, k: int) -> FiniteGroup:
    if not isprime(p) or k < 1:
        raise UnknownGroup(f"elementary abelian group needs prime p and k >= 1, got {p}^{k}", "group")
    _check_order(p**k)
    group = cyclic(p)
    for _ in range(k - 1):
        group = direct_product(group, cyclic(p))
    group.name = f"C{p}^{k}"
    return group


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str = "") -> FiniteGroup:
    """G x H with (a, b) stored at index a*|H| + b."""
    n, m = G.order, H.order
    _check_order(n * m)
    table = G.table[:, None, :, None] * m + H.table[None, :, None, :]
    return FiniteGroup(table.reshape(n * m, n * m), name=name or f"{G.name} x {H.name}")


_BUILDERS: Dict[str, Callable[..., FiniteGroup]] = {
    "cyclic": cyclic,
    "dihedral": dihedral,
    "symmetric": symmetric,
    "alternating": alternating,
    "quaternion": quaternion,
    "elementary_abelian": elementary_abelian,
}

_ALIASES = {"c": "cyclic", "d": "dihedral", "s": "symmetric", "a": "alternating",
            "q": "quaternion", "e": "elementary_abelian"}


def catalog(name: str, *params: int) -> FiniteGroup:
    """
    Build a named catalog group as a verified Cayley table.

    Args:
        name: cyclic, dihedral, symmetric, alternating, quaternion or
            elementary_abelian (single-letter aliases accepted).
        params: n for most families; p, k or the order p^k for elementary_abelian.
    """
    key = name.strip().lower().replace("-", "_")
    key = _ALIASES.get(key, key)
    if key not in _BUILDERS:
        raise UnknownGroup(f"unknown group family {name!r}", "group")
    if key == "elementary_abelian" and len(params) == 1:
        factors = factorint(params[0])
        if len(factors) != 1:
            raise UnknownGroup(f"{params[0]} is not a prime power", "group")
        params = tuple(next(iter(factors.items())))
    if key == "quaternion" and not params:
        params = (8,)
    expected = 2 if key == "elementary_abelian" else 1
    if len(params) != expected:
        raise UnknownGroup(f"{key} takes {expected} parameter(s), got {list(params)}", "group")
    return _BUILDERS[key](*params)


def parse_group_spec(spec: str) -> FiniteGroup:
    """Parse ``family:n[:m]`` factors joined by ``x``."""
    factors = [part.strip() for part in re.split(r"\s+x\s+|\s*\*\s*", spec.strip()) if part.strip()]
    if not factors:
        raise ValidationError(f"empty group spec {spec!r}", "group")
    groups = []
    for factor in factors:
        name, *raw = factor.split(":")
        try:
            params = [int(x) for x in raw]
        except ValueError:
            raise ValidationError(f"group parameters must be integers in {factor!r}", "group")
        groups.append(catalog(name, *params))
    group = groups[0]
    for other in groups[1:]:
        group = direct_product(group, other)
    return group


def load_cayley(path: Path) -> FiniteGroup:
    """Read the group JSON format ``{"order": n, "table": [[...]]}``."""
    try:
        data = json.loads(Path(path).read_text())
        order, table = int(data["order"]), data["table"]
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ValidationError(f"cannot read Cayley table from {path}: {e}", "cayley")
    if len(table) != order:
        raise ValidationError(f"table has {len(table)} rows, order says {order}", "cayley")
    return FiniteGroup(table, labels=data.get("labels"), name=data.get("name", Path(path).stem))


def _sweep_bases(max_order: int) -> List[Tuple[str, FiniteGroup]]:
    bases = [(f"cyclic:{n}", cyclic(n)) for n in range(2, max_order + 1)]
    bases += [(f"dihedral:{n}", dihedral(n)) for n in range(2, max_order // 2 + 1)]
    bases += [(f"symmetric:{n}", symmetric(n)) for n in range(3, 7) if factorial(n) <= max_order]
    bases += [(f"alternating:{n}", alternating(n)) for n in range(4, 7) if factorial(n) // 2 <= max_order]
    if max_order >= 8:
        bases.append(("quaternion:8", quaternion(8)))
    for p in (q for q in range(2, max_order + 1) if isprime(q)):
        k = 2
        while p**k <= max_order:
            bases.append((f"elementary_abelian:{p}:{k}", elementary_abelian(p, k)))
            k += 1
    return bases


def catalog_sweep(max_order: int) -> List[Tuple[str, FiniteGroup]]:
    """
    Every catalog group of order 2..max_order, pairwise direct products of
    catalog groups included, plus Q8, D4, A4, S4, C2 x C4 and C3 x C3.
    """
    bases = _sweep_bases(max_order)
    groups: Dict[str, FiniteGroup] = dict(bases)
    for i, (name_a, a) in enumerate(bases):
        for name_b, b in bases[i:]:
            if a.order * b.order <= max_order:
                groups[f"{name_a} x {name_b}"] = direct_product(a, b)
    for spec in ("quaternion:8", "dihedral:4", "alternating:4", "symmetric:4",
                 "cyclic:2 x cyclic:4", "cyclic:3 x cyclic:3"):
        if spec not in groups:
            groups[spec] = parse_group_spec(spec)
    return sorted(groups.items(), key=lambda item: (item[1].order, item[0]))
