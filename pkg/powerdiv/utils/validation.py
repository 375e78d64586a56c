"""
Error types and input validation utilities.
"""

from fractions import Fraction
from typing import Any, Dict, List, Tuple


class PowerDivError(Exception):
    """Base class for every error raised by powerdiv."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message}


class ValidationError(PowerDivError):
    """Invalid user input (polynomial text, ranges, group specs)."""

    def __init__(self, message: str, field: str = None):
        self.field = field
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["field"] = self.field
        return data


class CapExhausted(PowerDivError):
    """Fewer witnesses than requested were found below the prime cap."""

    def __init__(self, message: str, partial: List[int], certificate: Any = None):
        self.partial = list(partial)
        self.certificate = certificate
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["partial"] = self.partial
        return data


class RootAtZero(PowerDivError):
    """P(0) = 0: every prime divides P(T^k) through the root 0."""


class RootAtOne(PowerDivError):
    """P(1) = 0: every prime divides P(T^k) through the root 1."""


class IrrationalRoots(PowerDivError):
    """The certified search needs all roots of P in Q."""


class NoKFound(PowerDivError):
    """No exponent in the scanned range produced a witness in its probe."""

    def __init__(self, message: str, probe_stats: List[Any]):
        self.probe_stats = list(probe_stats)
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["probe_stats"] = [
            stat.model_dump(mode="json") if hasattr(stat, "model_dump") else stat
            for stat in self.probe_stats
        ]
        return data


class RootOfUnity(PowerDivError):
    """t is 1 or -1, whose height is zero."""


class ZeroValue(PowerDivError):
    """t is 0."""


class UnsupportedCase(PowerDivError):
    """No exact group model is available for the requested (t, k)."""


class TrivialGroup(PowerDivError):
    """The group has a single element."""


class UnknownGroup(ValidationError):
    """The catalog has no group with that name or those parameters."""


class TooLarge(PowerDivError):
    """A constructed group would exceed the configured order cap."""


def validate_prime_range(lo: int, hi: int, field: str = "range") -> Tuple[int, int]:
    """
    Validate a half-open prime range [lo, hi).

    Args:
        lo: Lower bound (inclusive), at least 2.
        hi: Upper bound (exclusive), at most 2^62.

    Returns:
        Tuple[int, int]: The validated bounds.
    """
    if lo < 2:
        raise ValidationError(f"lower bound must be at least 2, got {lo}", field)
    if hi > 1 << 62:
        raise ValidationError(f"upper bound must not exceed 2^62, got {hi}", field)
    if hi < lo:
        raise ValidationError(f"empty range [{lo}, {hi})", field)
    return lo, hi


def validate_positive(value: int, field: str) -> int:
    if value < 1:
        raise ValidationError(f"{field} must be a positive integer, got {value}", field)
    return value


def parse_rational(text: str, field: str = "t") -> Fraction:
    """
    Parse a rational number written as an integer or as num/den.

    Args:
        text: Text such as "-4", "3/2" or "-8/27".
        field: Name reported on failure.

    Returns:
        Fraction: The value in lowest terms.
    """
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"not a rational number: {text!r}", field)
    return value


def parse_integer(text: str, field: str) -> int:
    value = parse_rational(text, field)
    if value.denominator != 1:
        raise ValidationError(f"{field} must be an integer, got {text!r}", field)
    return value.numerator
