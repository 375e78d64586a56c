"""
Witness sieve: prime-divisor status of P(T) and P(T^k) over prime ranges.
"""

import logging
import math
import multiprocessing as mp
from contextlib import nullcontext
from multiprocessing.pool import Pool
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from sympy import divisors, primefactors

from powerdiv.config.settings import Settings, settings as default_settings
from powerdiv.core import chebmodel
from powerdiv.core.arith import compose_coeffs, discriminant, divides, rational_roots
from powerdiv.core.powers import kth_power_test
from powerdiv.core.primes import prime_stream, segments
from powerdiv.models.polynomial import IntPoly
from powerdiv.models.schemas import DensityReport, SieveJob, WitnessRecord
from powerdiv.services.cache_service import SieveCache
from powerdiv.utils.validation import (
    CapExhausted,
    PowerDivError,
    ValidationError,
    validate_positive,
    validate_prime_range,
)

logger = logging.getLogger(__name__)

RawRecord = Tuple[int, bool, bool]


def excluded_primes(P: IntPoly, k: int) -> Tuple[int, ...]:
    """
    Primes dividing disc(P), k or P(0): where lifting a root of P(T^k) to a
    root of P(T) may fail.
    """
    product = k * abs(P.coeffs[0]) if P.coeffs[0] else k
    disc = discriminant(P)
    if disc == 0:
        logger.warning("P = %s is not squarefree; disc(P) = 0 is left out of the excluded set", P)
    else:
        product *= abs(disc)
    return tuple(int(p) for p in primefactors(product)) if product > 1 else ()


def rational_root_obstruction(P: IntPoly, k: int) -> bool:
    """
    True when P(T^k) has a rational root, i.e. some root of P is a k-th power
    in Q. Every prime then divides both P(T) and P(T^k), so no witness exists.
    """
    roots, _ = rational_roots(P)
    return any(kth_power_test(t, k) is not None for t in roots)


def _sieve_segment(args: Tuple) -> List[RawRecord]:
    coeffs, composed, lo, hi, excluded, threshold, shortcut = args
    excluded = set(excluded)
    out: List[RawRecord] = []
    for p in prime_stream(lo, hi):
        if p in excluded:
            continue
        out.append((p, divides(coeffs, p, threshold, shortcut), divides(composed, p, threshold, shortcut)))
    return out


def _pool_context():
    # fork shares the parent's imports; spawn elsewhere
    try:
        return mp.get_context("fork")
    except ValueError:
        return mp.get_context()


class SieveService:
    """
    Runs sieve jobs over disjoint prime sub-ranges and merges them in order.
    """

    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the sieve service."""
        self.settings = settings or default_settings
        self.cache = SieveCache(self.settings)

    def make_job(self, P: IntPoly, k: int, lo: int = 2, hi: Optional[int] = None) -> SieveJob:
        """
        Build a sieve job with its excluded prime set.

        Args:
            P: Monic polynomial.
            k: Positive exponent.
            lo: Lower bound of the prime range (inclusive).
            hi: Upper bound (exclusive); defaults to the configured cap.
        """
        validate_positive(k, "k")
        hi = self.settings.default_cap if hi is None else hi
        validate_prime_range(lo, hi)
        return SieveJob(poly=P, k=k, lo=lo, hi=hi, excluded=excluded_primes(P, k))

    def sieve(self, job: SieveJob, pool: Optional[Pool] = None) -> List[WitnessRecord]:
        """
        One record per prime of [lo, hi) outside the excluded set, increasing.

        The output does not depend on the worker count or on cache state. A
        caller running many jobs may pass an open pool to share it.
        """
        if self.settings.use_cache:
            cached = self.cache.load(job)
            if cached is not None:
                return cached

        composed = compose_coeffs(job.poly.coeffs, job.k)
        tasks = [
            (job.poly.coeffs, composed, lo, hi, job.excluded,
             self.settings.root_scan_threshold, self.settings.binomial_shortcut)
            for lo, hi in segments(job.lo, job.hi, self.settings.segment_size)
        ]
        workers = max(1, min(self.settings.workers, len(tasks)))
        logger.info("Sieving P=%s k=%d over [%d, %d) in %d segment(s), %d worker(s)",
                    job.poly, job.k, job.lo, job.hi, len(tasks), workers)
        if workers == 1:
            chunks = [_sieve_segment(task) for task in tasks]
        elif pool is not None:
            chunks = pool.map(_sieve_segment, tasks)
        else:
            with _pool_context().Pool(processes=workers) as own_pool:
                chunks = own_pool.map(_sieve_segment, tasks)

        records = [
            WitnessRecord(p=p, divides_P=dP, divides_Pk=dPk)
            for chunk in chunks
            for p, dP, dPk in chunk
        ]
        if self.settings.use_cache:
            self.cache.store(job, records)
        return records

    def witness_count(self, job: SieveJob, records: Optional[Sequence[WitnessRecord]] = None) -> DensityReport:
        """
        Observed witness density with its binomial standard error, compared
        with the exact model prediction when one exists for (P, k).
        """
        records = self.sieve(job) if records is None else records
        n_primes = len(records)
        if n_primes == 0:
            raise ValidationError(f"no primes to scan in [{job.lo}, {job.hi}) outside the excluded set", "range")
        n_witnesses = sum(1 for r in records if r.is_witness)
        observed = Fraction(n_witnesses, n_primes)
        stderr = math.sqrt(float(observed) * (1 - float(observed)) / n_primes)

        predicted = self.predicted_density(job.poly, job.k)
        deviation = within = None
        if predicted is not None:
            gap = abs(float(observed) - float(predicted))
            within = gap <= self.settings.stderr_tolerance * stderr
            deviation = gap / stderr if stderr > 0 else None

        return DensityReport(
            job=job,
            n_primes=n_primes,
            n_witnesses=n_witnesses,
            observed=observed,
            observed_float=float(observed),
            predicted=predicted,
            stderr=stderr,
            deviation=deviation,
            within_tolerance=within,
            implication_violations=len(self.check_implications(job, records)),
        )

    @staticmethod
    def predicted_density(P: IntPoly, k: int) -> Optional[Fraction]:
        """Model density for P = T - t when an exact model exists, else None."""
        if P.degree != 1 or k < 2:
            return None
        try:
            model = chebmodel.build_model(-P.coeffs[0], k)
        except PowerDivError as e:
            logger.info("No density model for P=%s, k=%d: %s", P, k, e.message)
            return None
        return chebmodel.fpf_fraction(model).fpf_fraction

    def first_witnesses(self, P: IntPoly, k: int, want: int, cap: Optional[int] = None) -> List[int]:
        """
        The `want` smallest witness primes below cap.

        Windows of growing width are sieved from 2 upwards, so increasing the
        cap never changes the witnesses already found.

        Raises:
            CapExhausted: fewer than `want` witnesses below cap (partial list attached).
        """
        validate_positive(want, "want")
        validate_positive(k, "k")
        cap = self.settings.default_cap if cap is None else cap
        validate_prime_range(2, cap)
        excluded = excluded_primes(P, k)
        found: List[int] = []
        lo, width = 2, self.settings.segment_size
        parallel = self.settings.workers > 1
        with (_pool_context().Pool(processes=self.settings.workers) if parallel else nullcontext()) as pool:
            while lo < cap:
                hi = min(cap, lo + width)
                job = SieveJob(poly=P, k=k, lo=lo, hi=hi, excluded=excluded)
                found.extend(r.p for r in self.sieve(job, pool) if r.is_witness)
                if len(found) >= want:
                    return found[:want]
                lo, width = hi, width * 2
        raise CapExhausted(
            f"found {len(found)} of {want} witnesses for P={P}, k={k} below {cap}",
            partial=found,
        )

    def check_implications(self, job: SieveJob, records: Sequence[WitnessRecord]) -> List[str]:
        """
        Violations of the root-lifting rules on sieve output:
        divides_Pk implies divides_P outside the excluded set, and a prime
        divisor of P(T^k) divides P(T^d) for every d | k.
        """
        excluded = set(job.excluded)
        violations = []
        for r in records:
            if r.p not in excluded and r.divides_Pk and not r.divides_P:
                violations.append(f"p={r.p}: divides P(T^{job.k}) but not P(T)")
        composed = {d: compose_coeffs(job.poly.coeffs, d) for d in divisors(job.k)[1:-1]}
        for r in records:
            if not r.divides_Pk:
                continue
            for d, coeffs in composed.items():
                if not divides(coeffs, r.p, self.settings.root_scan_threshold, self.settings.binomial_shortcut):
                    violations.append(f"p={r.p}: divides P(T^{job.k}) but not P(T^{d})")
        return violations
