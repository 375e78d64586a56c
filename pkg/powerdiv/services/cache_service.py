"""
Line-delimited cache of sieve records.

One file per job. The first line is a header naming the job key, every
following line is ``p divides_P divides_Pk`` with the flags written as 0/1:

    # powerdiv-sieve v1 key=<sha256> coeffs=-2,1 k=3 lo=2 hi=40
    2 1 1
    3 1 1
    5 1 1
    7 1 0
"""

import hashlib
import logging
import os
import tempfile
from pathlib import Path
from typing import List, Optional, Sequence

from powerdiv.config.settings import Settings, settings as default_settings
from powerdiv.models.schemas import SieveJob, WitnessRecord

logger = logging.getLogger(__name__)

CACHE_VERSION = "v1"


def poly_hash(coeffs: Sequence[int]) -> str:
    return hashlib.sha256(",".join(str(c) for c in coeffs).encode("ascii")).hexdigest()


def job_key(job: SieveJob) -> str:
    return f"{poly_hash(job.poly.coeffs)}-k{job.k}-{job.lo}-{job.hi}"


def header_line(job: SieveJob) -> str:
    coeffs = ",".join(str(c) for c in job.poly.coeffs)
    return (
        f"# powerdiv-sieve {CACHE_VERSION} key={poly_hash(job.poly.coeffs)} "
        f"coeffs={coeffs} k={job.k} lo={job.lo} hi={job.hi}\n"
    )


def serialize_records(job: SieveJob, records: Sequence[WitnessRecord]) -> str:
    """Exact text of the cache file for a job."""
    lines = [header_line(job)]
    lines.extend(f"{r.p} {int(r.divides_P)} {int(r.divides_Pk)}\n" for r in records)
    return "".join(lines)


def parse_records(text: str) -> List[WitnessRecord]:
    records = []
    for line in text.splitlines()[1:]:
        p, dP, dPk = line.split()
        records.append(WitnessRecord(p=int(p), divides_P=dP == "1", divides_Pk=dPk == "1"))
    return records


class SieveCache:
    """
    File cache for sieve results keyed by (hash of P's coefficients, k, range).
    """

    def __init__(self, settings: Optional[Settings] = None):
        """Initialize the cache service."""
        self.settings = settings or default_settings
        self.cache_dir = Path(self.settings.cache_dir)

    def path_for(self, job: SieveJob) -> Path:
        return self.cache_dir / f"{job_key(job)}.txt"

    def load(self, job: SieveJob) -> Optional[List[WitnessRecord]]:
        """
        Load cached records for a job.

        Returns:
            Optional[List[WitnessRecord]]: The records, or None on a miss or a
            header that does not match the job.
        """
        path = self.path_for(job)
        if not path.exists():
            return None
        text = path.read_text(encoding="ascii")
        if not text.startswith(header_line(job)):
            logger.warning("Ignoring cache file with mismatched header: %s", path)
            return None
        try:
            records = parse_records(text)
        except ValueError:
            logger.warning("Ignoring corrupt cache file: %s", path)
            return None
        logger.info("Cache hit for %s", path.name)
        return records

    def store(self, job: SieveJob, records: Sequence[WitnessRecord]) -> Path:
        """Write the records atomically (temp file + rename)."""
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.path_for(job)
        fd, tmp = tempfile.mkstemp(dir=self.cache_dir, prefix=".tmp-", suffix=".txt")
        try:
            with os.fdopen(fd, "w", encoding="ascii", newline="\n") as handle:
                handle.write(serialize_records(job, records))
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
        return path
