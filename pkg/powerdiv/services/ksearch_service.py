"""
Exponent search: find k such that P(T) has prime divisors that are not
prime divisors of P(T^k), and certify it with witness primes.
"""

import logging
from math import lcm
from typing import List, Optional

from sympy import isprime, nextprime, prime, totient

from powerdiv.config.settings import Settings, settings as default_settings
from powerdiv.core.arith import compose_power, has_root_mod, rational_roots, reduce_mod
from powerdiv.core.parser import poly_to_text
from powerdiv.core.powers import capelli_irreducible, minimal_irreducible_prime, power_bound
from powerdiv.models.polynomial import IntPoly
from powerdiv.models.schemas import (
    BranchRecord,
    CertificateValidation,
    KCertificate,
    ProbeStat,
    RootInventory,
)
from powerdiv.services.sieve_service import SieveService, rational_root_obstruction
from powerdiv.utils.validation import (
    CapExhausted,
    IrrationalRoots,
    NoKFound,
    RootAtOne,
    RootAtZero,
    ValidationError,
    validate_positive,
)

logger = logging.getLogger(__name__)


def inventory(P: IntPoly) -> RootInventory:
    """Integer roots of P with multiplicity, plus the exact cofactor."""
    roots, cofactor = rational_roots(P)
    return RootInventory(rational_roots=roots, irrational_part=cofactor)


def _check_degenerate_roots(P: IntPoly) -> None:
    if P.evaluate(0) == 0:
        raise RootAtZero(f"P(0) = 0 for P = {P}: every prime divides P(T^k) through the root 0")
    if P.evaluate(1) == 0:
        raise RootAtOne(f"P(1) = 0 for P = {P}: every prime divides P(T^k) through the root 1")


def _smallest_power_of_two_above(bound: int) -> int:
    return 1 << bound.bit_length()


class KSearchService:
    """
    Certified and heuristic exponent search.

    The certified branch handles P with every root in Q; the heuristic branch
    probes k = 2, 3, ... with a short sieve and works for any P.
    """

    def __init__(self, settings: Optional[Settings] = None, sieve: Optional[SieveService] = None):
        """Initialize the search service."""
        self.settings = settings or default_settings
        self.sieve = sieve or SieveService(self.settings)

    def branch_log(self, P: IntPoly) -> List[BranchRecord]:
        """
        Per-root exponents for a polynomial whose roots are all rational.

        Roots are taken by increasing |t|. D, the running degree bound, starts
        at 1 and is multiplied by k_j * phi(k_j) after each root. The root -1
        takes the smallest power of 2 above D; any other root t takes the
        smallest prime above both power_bound(t) and D.
        """
        roots = sorted(set(inventory(P).rational_roots), key=lambda r: (abs(r), r))
        bound = 1
        log: List[BranchRecord] = []
        for t in roots:
            if t == -1:
                k_j = _smallest_power_of_two_above(bound)
                log.append(BranchRecord(root=t, branch="unity", k_j=k_j, degree_bound=bound))
            else:
                k_j = minimal_irreducible_prime(t, bound)
                log.append(BranchRecord(
                    root=t,
                    branch="non-unity",
                    k_j=k_j,
                    degree_bound=bound,
                    power_bound=power_bound(t),
                    capelli_irreducible=capelli_irreducible(t, k_j),
                ))
            bound *= k_j * int(totient(k_j))
        return log

    def find_k_certified(self, P: IntPoly, witnesses: Optional[int] = None, cap: Optional[int] = None) -> KCertificate:
        """
        Construct k = lcm of the per-root exponents and collect witnesses.

        Raises:
            RootAtZero, RootAtOne: P vanishes at 0 or 1.
            IrrationalRoots: P has a non-rational root; use find_k_heuristic.
            ValidationError: P is not squarefree.
            CapExhausted: too few witnesses below cap; the partial certificate is attached.
        """
        want = self.settings.default_witnesses if witnesses is None else witnesses
        cap = self.settings.default_cap if cap is None else cap
        validate_positive(want, "witnesses")
        _check_degenerate_roots(P)
        inv = inventory(P)
        if inv.irrational_part != (1,):
            raise IrrationalRoots(
                f"P = {P} has roots outside Q (cofactor {list(inv.irrational_part)}); "
                "use the heuristic search"
            )
        if not P.squarefree:
            raise ValidationError(f"the certified search needs a squarefree polynomial, got {P}", "poly")

        log = self.branch_log(P)
        k = lcm(*(record.k_j for record in log))
        degree_bound = 1
        for record in log:
            degree_bound *= record.k_j * int(totient(record.k_j))
        logger.info("Certified k = %d for P = %s (per-root exponents %s)", k, P, [r.k_j for r in log])

        def certificate(found: List[int], partial: bool) -> KCertificate:
            return KCertificate(
                poly=P,
                poly_text=poly_to_text(P),
                k=k,
                combined_rule="lcm",
                branch_log=log,
                degree_bound=degree_bound,
                witnesses=found,
                requested_witnesses=want,
                cap=cap,
                partial=partial,
            )

        try:
            found = self.sieve.first_witnesses(P, k, want, cap)
        except CapExhausted as e:
            e.certificate = certificate(e.partial, partial=True)
            raise
        return certificate(found, partial=False)

    def probe(self, P: IntPoly, k: int, hi: int) -> ProbeStat:
        """Witness count for one k over the primes below hi."""
        if rational_root_obstruction(P, k):
            return ProbeStat(k=k, primes_probed=0, witnesses_found=0, rational_root_obstruction=True)
        records = self.sieve.sieve(self.sieve.make_job(P, k, 2, hi))
        return ProbeStat(
            k=k,
            primes_probed=len(records),
            witnesses_found=sum(1 for r in records if r.is_witness),
            rational_root_obstruction=False,
        )

    def find_k_heuristic(
        self,
        P: IntPoly,
        kmax: Optional[int] = None,
        witnesses: Optional[int] = None,
        cap: Optional[int] = None,
    ) -> KCertificate:
        """
        Smallest k in [2, kmax] whose probe over the first `probe_primes`
        primes finds a witness, extended to the requested witness count.

        Exponents for which some root of P is a k-th power in Q are skipped
        without sieving.

        Raises:
            RootAtZero, RootAtOne: P vanishes at 0 or 1.
            NoKFound: no probe succeeded (per-k statistics attached).
            CapExhausted: too few witnesses below cap for the chosen k.
        """
        kmax = self.settings.default_kmax if kmax is None else kmax
        want = self.settings.default_witnesses if witnesses is None else witnesses
        cap = self.settings.default_cap if cap is None else cap
        validate_positive(want, "witnesses")
        _check_degenerate_roots(P)
        if kmax < 2:
            raise NoKFound(f"empty exponent range [2, {kmax}]", probe_stats=[])

        hi = int(prime(self.settings.probe_primes)) + 1
        stats: List[ProbeStat] = []
        chosen = None
        for k in range(2, kmax + 1):
            stat = self.probe(P, k, hi)
            stats.append(stat)
            if stat.witnesses_found > 0:
                chosen = k
                break
            logger.debug("No witness for P = %s, k = %d (obstructed: %s)", P, k, stat.rational_root_obstruction)
        if chosen is None:
            raise NoKFound(f"no k in [2, {kmax}] gave a witness below {hi} for P = {P}", probe_stats=stats)

        def certificate(found: List[int], partial: bool) -> KCertificate:
            return KCertificate(
                poly=P,
                poly_text=poly_to_text(P),
                k=chosen,
                combined_rule="heuristic",
                witnesses=found,
                requested_witnesses=want,
                cap=cap,
                partial=partial,
                probe_stats=stats,
            )

        try:
            found = self.sieve.first_witnesses(P, chosen, want, cap)
        except CapExhausted as e:
            e.certificate = certificate(e.partial, partial=True)
            raise
        return certificate(found, partial=False)

    def validate(self, cert: KCertificate) -> CertificateValidation:
        """
        Re-check a certificate from scratch, without the cache.

        Every witness is recomputed against P and P(T^k); for the lcm rule the
        branch log is checked against P's roots and the lcm and bound
        arithmetic is redone.
        """
        diagnoses: List[str] = []
        P, k = cert.poly, cert.k
        if k < 2:
            diagnoses.append(f"k = {k} cannot have witnesses")
        if not cert.witnesses:
            diagnoses.append("certificate lists no witnesses")
        if any(b <= a for a, b in zip(cert.witnesses, cert.witnesses[1:])):
            diagnoses.append("witnesses must be distinct and strictly increasing")
        distinct = len(set(cert.witnesses))
        if not cert.partial and distinct < cert.requested_witnesses:
            diagnoses.append(f"{distinct} distinct witnesses listed, {cert.requested_witnesses} requested")
        if poly_to_text(P) != cert.poly_text:
            diagnoses.append(f"poly_text {cert.poly_text!r} does not match {poly_to_text(P)!r}")

        composed = compose_power(P, k) if k >= 1 else None
        for p in cert.witnesses:
            if not isprime(p):
                diagnoses.append(f"witness {p} is not prime")
                continue
            if not has_root_mod(reduce_mod(P, p)):
                diagnoses.append(f"witness {p} is not a prime divisor of P(T)")
            if composed is not None and has_root_mod(reduce_mod(composed, p)):
                diagnoses.append(f"witness {p} is a prime divisor of P(T^{k})")

        if cert.combined_rule == "lcm":
            diagnoses.extend(self._check_branch_log(cert))

        valid = not diagnoses
        if not valid:
            logger.warning("Certificate for %s rejected: %s", cert.poly_text, diagnoses)
        return CertificateValidation(valid=valid, diagnoses=diagnoses)

    def _check_branch_log(self, cert: KCertificate) -> List[str]:
        diagnoses: List[str] = []
        log = cert.branch_log
        if not log:
            return ["lcm certificate without a branch log"]
        roots = sorted(set(inventory(cert.poly).rational_roots), key=lambda r: (abs(r), r))
        if [record.root for record in log] != roots:
            diagnoses.append(f"branch roots {[r.root for r in log]} differ from the roots of P {roots}")
        if lcm(*(record.k_j for record in log)) != cert.k:
            diagnoses.append(f"k = {cert.k} is not the lcm of the per-root exponents")

        bound = 1
        for record in log:
            if record.degree_bound != bound:
                diagnoses.append(f"root {record.root}: degree bound {record.degree_bound}, expected {bound}")
            if record.branch == "unity":
                if record.root != -1:
                    diagnoses.append(f"root {record.root} is not -1 but took the unity branch")
                if record.k_j & (record.k_j - 1) or record.k_j <= bound:
                    diagnoses.append(f"root -1: k_j = {record.k_j} is not a power of 2 above {bound}")
            else:
                t = record.root
                if t in (0, 1, -1):
                    diagnoses.append(f"root {t} cannot take the non-unity branch")
                else:
                    if record.k_j <= power_bound(t):
                        diagnoses.append(f"root {t}: k_j = {record.k_j} does not exceed the power bound")
                    if record.k_j <= bound or not isprime(record.k_j):
                        diagnoses.append(f"root {t}: k_j = {record.k_j} is not a prime above {bound}")
                    if not capelli_irreducible(t, record.k_j):
                        diagnoses.append(f"root {t}: T^{record.k_j} - ({t}) is reducible")
            bound *= record.k_j * int(totient(record.k_j))
        if cert.degree_bound is not None and cert.degree_bound != bound:
            diagnoses.append(f"degree bound {cert.degree_bound}, expected {bound}")
        return diagnoses

    def next_certified(self, cert: KCertificate, m: int) -> List[int]:
        """
        The next m certified exponents: k times each of the m smallest primes
        exceeding every bound recorded in the certificate.
        """
        if cert.combined_rule != "lcm":
            raise ValidationError("further exponents are only certified for the lcm rule", "next")
        if m < 1:
            return []
        bound = max([cert.k, cert.degree_bound or 1] + [record.k_j for record in cert.branch_log])
        values = []
        q = bound
        for _ in range(m):
            q = int(nextprime(q))
            values.append(cert.k * q)
        return values
