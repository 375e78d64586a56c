"""
Command-line entry point.

    python -m powerdiv sieve --poly "T-2" --k 3 --hi 1000000
    python -m powerdiv ksearch --poly "(T-2)*(T-3)" --witnesses 10
    python -m powerdiv ksearch validate --cert cert.json
    python -m powerdiv h2check sweep --max-order 24

Every report is one JSON document on stdout (or --out). Exit codes: 0 on
success, 1 on a mathematical negative, 2 on a usage error.
"""

import argparse
import csv
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from powerdiv import __version__
from powerdiv.config.settings import Settings, settings as default_settings
from powerdiv.core.catalog import from_cycles, load_cayley, parse_group_spec
from powerdiv.core.parser import parse_poly
from powerdiv.core.powers import capelli_irreducible, kth_power_test, power_bound, weil_height
from powerdiv.models.schemas import KCertificate, RunConfig, SieveReport, WitnessRecord
from powerdiv.services.chebmodel_service import ChebModelService
from powerdiv.services.corpus_service import CorpusService, load_corpus
from powerdiv.services.group_service import GroupService
from powerdiv.services.ksearch_service import KSearchService
from powerdiv.services.sieve_service import SieveService
from powerdiv.utils.validation import (
    CapExhausted,
    PowerDivError,
    ValidationError,
    parse_integer,
    parse_rational,
    validate_positive,
)

logger = logging.getLogger("powerdiv")

SCHEMA_VERSION = 1
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so main() owns exit codes."""

    def error(self, message: str):
        raise ValidationError(message, "argv")


def _global_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--workers", type=int, help="range workers (default: available CPUs)")
    parent.add_argument("--cache-dir", help="sieve cache directory (env POWERDIV_CACHE_DIR)")
    parent.add_argument("--no-cache", dest="use_cache", action="store_false", help="disable the sieve cache")
    parent.add_argument("--no-timestamp", dest="timestamp", action="store_false", help="omit generated_at")
    parent.add_argument("--out", help="write the JSON report to this file instead of stdout")
    parent.add_argument("--log-level", help="logging level on stderr (default WARNING)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parent = _global_flags()
    parser = UsageParser(prog="powerdiv", description="Prime divisors of P(T) versus P(T^k).")
    parser.add_argument("--version", action="version", version=f"powerdiv {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    sieve = commands.add_parser("sieve", parents=[parent], help="witness sieve over a prime range")
    sieve.add_argument("--poly", required=True)
    sieve.add_argument("--k", type=int, required=True)
    sieve.add_argument("--lo", type=int, default=2)
    sieve.add_argument("--hi", type=int)
    sieve.add_argument("--csv", help="also write the witness records as CSV")

    ksearch = commands.add_parser("ksearch", parents=[parent], help="find and certify an exponent k")
    ksearch.add_argument("action", nargs="?", choices=["validate"])
    ksearch.add_argument("--poly")
    ksearch.add_argument("--witnesses", type=int)
    ksearch.add_argument("--cap", type=int)
    ksearch.add_argument("--heuristic", action="store_true")
    ksearch.add_argument("--kmax", type=int)
    ksearch.add_argument("--next", type=int, default=0, help="also list the next N certified exponents")
    ksearch.add_argument("--cert", help="certificate file for 'validate'")

    for name, text in (("capelli", "Capelli irreducibility of T^k - t"),
                       ("height", "Weil height of a rational"),
                       ("powerbound", "bound on k with t a k-th power")):
        sub = commands.add_parser(name, parents=[parent], help=text)
        sub.add_argument("--t", required=True)
        if name == "capelli":
            sub.add_argument("--k", type=int, required=True)

    h2 = commands.add_parser("h2check", parents=[parent], help="condition (H2) for a finite group")
    h2.add_argument("action", nargs="?", choices=["sweep"])
    h2.add_argument("--group", help="catalog spec, e.g. symmetric:4 or 'cyclic:12 x cyclic:2'")
    h2.add_argument("--cayley", help="group JSON file with a Cayley table")
    h2.add_argument("--perms", nargs="+", default=[], help="generators in cycle notation")
    h2.add_argument("--max-order", type=int)

    harness = commands.add_parser("lemma23", parents=[parent], help="density harness for T - t")
    harness.add_argument("--t", required=True)
    harness.add_argument("--k", type=int, required=True)
    harness.add_argument("--cap", type=int)

    corpus = commands.add_parser("corpus", parents=[parent], help="run a regression corpus")
    corpus.add_argument("corpus", nargs="?", help="corpus JSON (default: bundled corpus)")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**values)


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def envelope(config: RunConfig, payload: Dict[str, Any]) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"schema": SCHEMA_VERSION, "command": config.command}
    if config.timestamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc.update(payload)
    return doc


def dump(model: BaseModel) -> Dict[str, Any]:
    return model.model_dump(mode="json")


def emit(config: RunConfig, doc: Dict[str, Any]) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if config.out:
        Path(config.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def write_csv(path: str, records: Sequence[WitnessRecord]) -> None:
    """Witness records as CSV: header p,divides_P,divides_Pk."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["p", "divides_P", "divides_Pk"])
        for r in records:
            if r.is_witness:
                writer.writerow([r.p, int(r.divides_P), int(r.divides_Pk)])


def _require(value: Any, flag: str) -> Any:
    if value is None:
        raise ValidationError(f"missing required flag --{flag}", flag)
    return value


def run_sieve(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    service = SieveService(settings)
    job = service.make_job(parse_poly(config.poly), config.k, config.lo, config.hi)
    records = service.sieve(job)
    report = SieveReport(
        density=service.witness_count(job, records),
        witnesses=[r.p for r in records if r.is_witness],
    )
    if config.csv:
        write_csv(config.csv, records)
    return dump(report)


def run_ksearch(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    service = KSearchService(settings)
    if config.action == "validate":
        path = _require(config.cert, "cert")
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            cert = KCertificate.model_validate(data.get("certificate", data))
        except (OSError, ValueError, AttributeError) as e:
            raise ValidationError(f"cannot read certificate {path}: {e}", "cert")
        result = service.validate(cert)
        if not result.valid:
            raise CertificateRejected(result)
        return {"validation": dump(result)}

    P = parse_poly(_require(config.poly, "poly"))
    if config.heuristic:
        cert = service.find_k_heuristic(P, config.kmax, config.witnesses, config.cap)
    else:
        cert = service.find_k_certified(P, config.witnesses, config.cap)
        if config.next:
            cert = cert.model_copy(update={"next_values": service.next_certified(cert, config.next)})
    return {"certificate": dump(cert)}


def run_capelli(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    t = parse_rational(config.t)
    validate_positive(config.k, "k")
    irreducible = capelli_irreducible(t, config.k)
    root = kth_power_test(t, config.k)
    return {
        "t": f"{t.numerator}/{t.denominator}",
        "k": config.k,
        "irreducible": irreducible,
        "kth_root": None if root is None else f"{root.numerator}/{root.denominator}",
    }


def run_height(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    t = parse_rational(config.t)
    return {"t": f"{t.numerator}/{t.denominator}", "height": dump(weil_height(t))}


def run_powerbound(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    t = parse_rational(config.t)
    return {"t": f"{t.numerator}/{t.denominator}", "power_bound": power_bound(t)}


def run_h2check(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    service = GroupService(settings)
    if config.action == "sweep":
        report = service.sweep(config.max_order)
        if report.exceptions:
            raise SweepMismatch(report)
        return {"sweep": dump(report)}
    sources = [bool(config.group), bool(config.cayley), bool(config.perms)]
    if sum(sources) != 1:
        raise ValidationError("give exactly one of --group, --cayley, --perms", "group")
    if config.group:
        G = parse_group_spec(config.group)
    elif config.cayley:
        G = load_cayley(Path(config.cayley))
    else:
        G = from_cycles(config.perms)
    return {"report": dump(service.h2_report(G, config.group))}


def run_lemma23(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    t = parse_integer(config.t, "t")
    report = ChebModelService(settings).run(t, config.k, config.cap)
    if report.verdict == "fail":
        raise HarnessFailed(report)
    return {"report": dump(report)}


def run_corpus(config: RunConfig, settings: Settings) -> Dict[str, Any]:
    summary = CorpusService(settings).run(load_corpus(config.corpus))
    if summary.failed:
        raise CorpusFailed(summary)
    return {"summary": dump(summary)}


class ReportedNegative(PowerDivError):
    """A negative outcome whose full report is still emitted."""

    def __init__(self, message: str, key: str, report: BaseModel):
        self.key = key
        self.report = report
        super().__init__(message)

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data[self.key] = dump(self.report)
        return data


class CertificateRejected(ReportedNegative):
    def __init__(self, result):
        super().__init__("certificate failed validation", "validation", result)


class SweepMismatch(ReportedNegative):
    def __init__(self, report):
        super().__init__(f"(H2) verdict disagrees for {report.exceptions}", "sweep", report)


class HarnessFailed(ReportedNegative):
    def __init__(self, report):
        super().__init__("density harness check failed", "report", report)


class CorpusFailed(ReportedNegative):
    def __init__(self, summary):
        super().__init__(f"{summary.failed} of {summary.total} corpus case(s) failed", "summary", summary)


COMMANDS = {
    "sieve": run_sieve,
    "ksearch": run_ksearch,
    "capelli": run_capelli,
    "height": run_height,
    "powerbound": run_powerbound,
    "h2check": run_h2check,
    "lemma23": run_lemma23,
    "corpus": run_corpus,
}


def error_document(e: PowerDivError) -> Dict[str, Any]:
    data = e.to_dict()
    if isinstance(e, CapExhausted) and e.certificate is not None:
        data["certificate"] = dump(e.certificate)
    return data


def main(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one command and emit its JSON document; returns the exit code."""
    try:
        config = parse_config(argv)
    except ValidationError as e:
        sys.stderr.write(f"powerdiv: error: {e.message}\n")
        return EXIT_USAGE
    except PydanticValidationError as e:
        sys.stderr.write(f"powerdiv: error: {e.errors()[0]['msg']}\n")
        return EXIT_USAGE

    settings = default_settings.with_overrides(
        workers=config.workers,
        cache_dir=config.cache_dir,
        use_cache=config.use_cache,
        log_level=config.log_level,
    )
    configure_logging(settings.log_level)
    logger.debug("Run config: %s", config.model_dump_json())

    try:
        payload = COMMANDS[config.command](config, settings)
    except ValidationError as e:
        logger.error("Usage error on --%s: %s", e.field, e.message)
        emit(config, envelope(config, error_document(e)))
        return EXIT_USAGE
    except PowerDivError as e:
        logger.warning("%s: %s", type(e).__name__, e.message)
        emit(config, envelope(config, error_document(e)))
        return EXIT_NEGATIVE
    emit(config, envelope(config, payload))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
