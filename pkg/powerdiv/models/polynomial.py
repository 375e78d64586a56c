from numbers import Integral
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator, model_validator
from sympy import Poly, Symbol, isprime

T = Symbol("T")


class IntPoly(BaseModel):
    """
    Monic univariate polynomial with integer coefficients, lowest degree first.

    The squarefree flag is computed once, via gcd(P, P') over Q, when the
    polynomial is built. Non-squarefree input is accepted but flagged.
    """

    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[int, ...]

    _squarefree: bool = PrivateAttr(default=True)

    @field_validator("coeffs", mode="before")
    @classmethod
    def _as_int_tuple(cls, value):
        if not isinstance(value, (list, tuple)):
            raise ValueError(f"coefficients must be a list, got {type(value).__name__}")
        coeffs = tuple(value)
        for c in coeffs:
            if isinstance(c, bool) or not isinstance(c, Integral):
                raise ValueError(f"coefficients must be integers, got {c!r}")
        return tuple(int(c) for c in coeffs)

    @model_validator(mode="after")
    def _check_monic(self):
        if len(self.coeffs) < 2:
            raise ValueError("polynomial must have degree at least 1")
        if self.coeffs[-1] != 1:
            raise ValueError("polynomial must be monic (leading coefficient 1)")
        return self

    def model_post_init(self, __context) -> None:
        self._squarefree = bool(self.to_sympy().is_sqf)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def squarefree(self) -> bool:
        return self._squarefree

    def to_sympy(self) -> Poly:
        return Poly(list(reversed(self.coeffs)), T)

    def evaluate(self, x: int) -> int:
        value = 0
        for c in reversed(self.coeffs):
            value = value * x + c
        return value

    def __str__(self) -> str:
        terms: List[str] = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if power == 0:
                body = str(magnitude)
            else:
                monomial = "T" if power == 1 else f"T^{power}"
                body = monomial if magnitude == 1 else f"{magnitude}*{monomial}"
            if not terms:
                terms.append(body if sign == "+" else f"-{body}")
            else:
                terms.append(f"{sign} {body}")
        return " ".join(terms)


class ModPoly(BaseModel):
    """Polynomial with residues mod a machine-width prime, lowest degree first."""

    model_config = ConfigDict(frozen=True)

    prime: int
    coeffs: Tuple[int, ...]

    @model_validator(mode="after")
    def _check_residues(self):
        if not 2 <= self.prime < 1 << 62:
            raise ValueError(f"modulus must lie in [2, 2^62), got {self.prime}")
        if not isprime(self.prime):
            raise ValueError(f"modulus {self.prime} is not prime")
        if any(not 0 <= c < self.prime for c in self.coeffs):
            raise ValueError("residues must lie in [0, p)")
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("leading residue must be nonzero")
        return self

    @classmethod
    def from_residues(cls, prime: int, coeffs: Sequence[int]) -> "ModPoly":
        """Reduce and strip trailing zeros, lowest degree first."""
        reduced = [c % prime for c in coeffs]
        while reduced and reduced[-1] == 0:
            reduced.pop()
        return cls(prime=prime, coeffs=tuple(reduced))

    @classmethod
    def from_dense(cls, prime: int, dense: Sequence[int]) -> "ModPoly":
        """Build from a highest-degree-first list (sympy galoistools order)."""
        return cls.from_residues(prime, [int(c) for c in reversed(list(dense))])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def to_dense(self) -> List[int]:
        return list(reversed(self.coeffs))
