"""
Segmented sieve of Eratosthenes over [lo, hi).

Base primes up to DIRECT_LIMIT come from one plain sieve; above that they
are sieved in segments. Windows narrower than sqrt(hi) at that height are
tested candidate by candidate instead.
"""

from functools import lru_cache
from math import isqrt
from typing import Iterator, List, Optional, Tuple

import numpy as np
from sympy import isprime

from powerdiv.config.settings import settings

DIRECT_LIMIT = 1 << 24


def _plain_sieve(limit: int) -> np.ndarray:
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, isqrt(limit) + 1):
        if is_prime[i]:
            is_prime[i * i :: i] = False
    return np.flatnonzero(is_prime).astype(np.int64)


@lru_cache(maxsize=8)
def base_primes(limit: int) -> np.ndarray:
    """
    All primes up to limit (inclusive).

    Args:
        limit: Upper bound for the base primes.

    Returns:
        np.ndarray: Sorted int64 primes from 2 to limit.
    """
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if limit <= DIRECT_LIMIT:
        return _plain_sieve(limit)
    inner = base_primes(isqrt(limit) + 1)
    chunks = [_plain_sieve(DIRECT_LIMIT)]
    for start, end in segments(DIRECT_LIMIT + 1, limit + 1, DIRECT_LIMIT):
        chunks.append(np.asarray(sieve_segment(start, end, inner), dtype=np.int64))
    return np.concatenate(chunks)


def sieve_segment(lo: int, hi: int, primes: np.ndarray) -> List[int]:
    """Primes in [lo, hi) given every prime up to sqrt(hi)."""
    lo = max(lo, 2)
    if hi <= lo:
        return []
    is_prime = np.ones(hi - lo, dtype=bool)
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        first = max(p * p, ((lo + p - 1) // p) * p)
        if first >= hi:
            continue
        is_prime[first - lo :: p] = False
    return [lo + int(i) for i in np.flatnonzero(is_prime)]


def segments(lo: int, hi: int, size: Optional[int] = None) -> List[Tuple[int, int]]:
    """Split [lo, hi) into consecutive chunks of the given size."""
    size = size or settings.segment_size
    return [(start, min(start + size, hi)) for start in range(lo, hi, size)]


def prime_stream(lo: int, hi: int, segment_size: Optional[int] = None) -> Iterator[int]:
    """
    Yield every prime in [lo, hi) in increasing order.

    Args:
        lo: Lower bound (inclusive).
        hi: Upper bound (exclusive), at most 2^62.
        segment_size: Width of each sieved window.
    """
    if hi > 1 << 62:
        raise ValueError(f"upper bound must not exceed 2^62, got {hi}")
    lo = max(lo, 2)
    if hi <= lo:
        return
    limit = isqrt(hi - 1) + 1
    if limit > DIRECT_LIMIT and hi - lo <= limit:
        # isprime is deterministic below 2^64
        for start, end in segments(lo, hi, segment_size):
            yield from (n for n in range(start, end) if isprime(n))
        return
    primes = base_primes(limit)
    for start, end in segments(lo, hi, segment_size):
        yield from sieve_segment(start, end, primes)
