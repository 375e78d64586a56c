"""
Regression corpus runner.

A corpus is a JSON file ``{"schema": 1, "cases": [...]}``; each case names a
kind, its parameters and the expected outcome. An expectation of the form
``{"error": "CapExhausted"}`` means the case must raise that error.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

from pydantic import ValidationError as PydanticValidationError

from powerdiv.config.settings import BASE_DIR, Settings, settings as default_settings
from powerdiv.core.catalog import parse_group_spec
from powerdiv.core.parser import parse_poly
from powerdiv.core.powers import capelli_irreducible, power_bound
from powerdiv.models.schemas import CaseResult, CorpusCase, CorpusFile, CorpusSummary
from powerdiv.services.chebmodel_service import ChebModelService
from powerdiv.services.group_service import GroupService
from powerdiv.services.ksearch_service import KSearchService
from powerdiv.services.sieve_service import SieveService
from powerdiv.utils.validation import PowerDivError, ValidationError, parse_rational

logger = logging.getLogger(__name__)

DEFAULT_CORPUS = BASE_DIR / "powerdiv" / "data" / "default_corpus.json"

Outcome = Tuple[bool, str]


def load_corpus(path: Optional[Path] = None) -> CorpusFile:
    """
    Read and validate a corpus file.

    Raises:
        ValidationError: unreadable, malformed or empty corpus.
    """
    path = Path(path) if path else DEFAULT_CORPUS
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise ValidationError(f"cannot read corpus {path}: {e}", "corpus")
    try:
        return CorpusFile.model_validate(data)
    except PydanticValidationError as e:
        raise ValidationError(f"malformed corpus {path}: {e.errors()[0]['msg']}", "corpus")


class CorpusService:
    """Runs every case of a corpus and summarizes pass/fail."""

    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the corpus runner and the services it drives."""
        self.settings = settings or default_settings
        self.sieve = SieveService(self.settings)
        self.ksearch = KSearchService(self.settings, self.sieve)
        self.harness = ChebModelService(self.settings, self.sieve)
        self.groups = GroupService(self.settings)
        self._runners: Dict[str, Callable[[CorpusCase], Outcome]] = {
            "density": self._density,
            "witnesses": self._witnesses,
            "ksearch_certified": self._ksearch_certified,
            "ksearch_heuristic": self._ksearch_heuristic,
            "ksearch_error": self._ksearch_certified,
            "capelli": self._capelli,
            "power_bound": self._power_bound,
            "h2": self._h2,
            "lemma23": self._lemma23,
        }

    def run(self, corpus: CorpusFile) -> CorpusSummary:
        results = [self.run_case(case) for case in corpus.cases]
        passed = sum(1 for r in results if r.passed)
        return CorpusSummary(total=len(results), passed=passed, failed=len(results) - passed, results=results)

    def run_case(self, case: CorpusCase) -> CaseResult:
        expected_error = case.expect.get("error") if isinstance(case.expect, dict) else None
        try:
            passed, detail = self._runners[case.kind](case)
        except ValidationError:
            raise
        except PowerDivError as e:
            name = type(e).__name__
            passed = expected_error == name
            detail = f"raised {name}: {e.message}"
        except (TypeError, ValueError) as e:
            raise ValidationError(f"case {case.name!r}: {e}", "corpus")
        else:
            if expected_error is not None:
                passed, detail = False, f"expected {expected_error}, got a result ({detail})"
        logger.info("Case %s: %s", case.name, "pass" if passed else "FAIL")
        return CaseResult(name=case.name, kind=case.kind, passed=passed, detail=detail)

    @staticmethod
    def _param(case: CorpusCase, key: str, default: Any = None) -> Any:
        if key not in case.params and default is None:
            raise ValidationError(f"case {case.name!r} is missing parameter {key!r}", "corpus")
        return case.params.get(key, default)

    def _density(self, case: CorpusCase) -> Outcome:
        P = parse_poly(self._param(case, "poly"))
        job = self.sieve.make_job(P, self._param(case, "k"), self._param(case, "lo", 2), self._param(case, "hi"))
        report = self.sieve.witness_count(job)
        expected = Fraction(str(case.expect))
        tolerance = self.settings.stderr_tolerance if case.tolerance is None else case.tolerance
        gap = abs(float(report.observed) - float(expected))
        passed = gap <= tolerance * report.stderr if report.stderr > 0 else report.observed == expected
        passed = passed and report.implication_violations == 0
        return passed, (f"observed {report.observed_float:.6f} over {report.n_primes} primes, "
                        f"expected {float(expected):.6f}, stderr {report.stderr:.6f}")

    def _witnesses(self, case: CorpusCase) -> Outcome:
        P = parse_poly(self._param(case, "poly"))
        found = self.sieve.first_witnesses(P, self._param(case, "k"), self._param(case, "want"), self._param(case, "cap"))
        return found == list(case.expect), f"witnesses {found}"

    def _ksearch_certified(self, case: CorpusCase) -> Outcome:
        P = parse_poly(self._param(case, "poly"))
        cert = self.ksearch.find_k_certified(P, case.params.get("witnesses"), case.params.get("cap"))
        return self._check_certificate(case, cert)

    def _ksearch_heuristic(self, case: CorpusCase) -> Outcome:
        P = parse_poly(self._param(case, "poly"))
        cert = self.ksearch.find_k_heuristic(
            P, case.params.get("kmax"), case.params.get("witnesses"), case.params.get("cap")
        )
        return self._check_certificate(case, cert)

    def _check_certificate(self, case: CorpusCase, cert) -> Outcome:
        validation = self.ksearch.validate(cert)
        expect = case.expect or {}
        passed = validation.valid
        if "k" in expect:
            passed = passed and cert.k == expect["k"]
        if "first_witness" in expect:
            passed = passed and cert.witnesses[:1] == [expect["first_witness"]]
        return passed, f"k = {cert.k}, {len(cert.witnesses)} witnesses, diagnoses {validation.diagnoses}"

    def _capelli(self, case: CorpusCase) -> Outcome:
        t = parse_rational(str(self._param(case, "t")))
        value = capelli_irreducible(t, self._param(case, "k"))
        return value == case.expect, f"irreducible = {value}"

    def _power_bound(self, case: CorpusCase) -> Outcome:
        value = power_bound(parse_rational(str(self._param(case, "t"))))
        return value == case.expect, f"power bound = {value}"

    def _h2(self, case: CorpusCase) -> Outcome:
        report = self.groups.h2_report(parse_group_spec(self._param(case, "group")))
        return report.witness.verdict == case.expect and report.consistent, f"verdict {report.witness.verdict}"

    def _lemma23(self, case: CorpusCase) -> Outcome:
        report = self.harness.harness_lemma23(self._param(case, "t"), self._param(case, "k"), case.params.get("cap"))
        return report.verdict == case.expect, (
            f"verdict {report.verdict}, observed {float(report.observed):.6f}, predicted {report.predicted}"
        )
