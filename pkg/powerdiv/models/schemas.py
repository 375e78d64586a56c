from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_validator,
    model_validator,
)

from powerdiv.models.polynomial import IntPoly


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


# Exact rationals travel as "num/den" strings
ExactFraction = Annotated[
    Fraction,
    BeforeValidator(_to_fraction),
    PlainSerializer(lambda v: f"{v.numerator}/{v.denominator}", return_type=str),
]


class ExactModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)


class HeightValue(BaseModel):
    value: float
    exact_form: int


class WitnessRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    divides_P: bool
    divides_Pk: bool

    @property
    def is_witness(self) -> bool:
        return self.divides_P and not self.divides_Pk


class SieveJob(BaseModel):
    model_config = ConfigDict(frozen=True)

    poly: IntPoly
    k: int
    lo: int
    hi: int
    excluded: Tuple[int, ...]

    @field_validator("lo")
    @classmethod
    def _lo_at_least_two(cls, value: int) -> int:
        if value < 2:
            raise ValueError("lo must be at least 2")
        return value


class DensityReport(ExactModel):
    job: SieveJob
    n_primes: int = Field(gt=0)
    n_witnesses: int
    observed: ExactFraction
    observed_float: float
    predicted: Optional[ExactFraction] = None
    stderr: float
    deviation: Optional[float] = None
    within_tolerance: Optional[bool] = None
    implication_violations: int = 0


class SieveReport(BaseModel):
    density: DensityReport
    witnesses: List[int]


class RootInventory(BaseModel):
    rational_roots: List[int]
    irrational_part: Tuple[int, ...]


class BranchRecord(BaseModel):
    root: int
    branch: Literal["unity", "non-unity"]
    k_j: int
    degree_bound: int
    power_bound: Optional[int] = None
    capelli_irreducible: Optional[bool] = None


class ProbeStat(BaseModel):
    k: int
    primes_probed: int
    witnesses_found: int
    rational_root_obstruction: bool


class KCertificate(BaseModel):
    poly: IntPoly
    poly_text: str
    k: int
    combined_rule: Literal["lcm", "heuristic"]
    branch_log: List[BranchRecord] = Field(default_factory=list)
    degree_bound: Optional[int] = None
    witnesses: List[int]
    requested_witnesses: int
    cap: int
    partial: bool = False
    next_values: List[int] = Field(default_factory=list)
    probe_stats: List[ProbeStat] = Field(default_factory=list)


class CertificateValidation(BaseModel):
    valid: bool
    diagnoses: List[str] = Field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


class ConjClass(BaseModel):
    model_config = ConfigDict(frozen=True)

    representative: int
    members: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.members)


class H2Witness(BaseModel):
    verdict: Literal["holds", "fails"]
    C: Optional[ConjClass] = None
    generating_classes: List[ConjClass] = Field(default_factory=list)


class H2Report(BaseModel):
    group: str
    order: int
    n_classes: int
    is_cyclic_p_group: bool
    witness: H2Witness
    consistent: bool


class SweepReport(BaseModel):
    max_order: int
    groups: int
    exceptions: List[str]
    reports: List[H2Report]


class ValidityChecks(BaseModel):
    capelli_irreducible: bool
    squarefree: bool
    expected_order: int
    order_divides_k_phi_k: bool
    group_axioms: bool
    transitive: bool


class PermGroupModel(BaseModel):
    t: int
    k: int
    provenance: Literal["metacyclic-full", "cyclic-kummer"]
    elements: List[Tuple[int, ...]]
    validity_checks: ValidityChecks

    @property
    def order(self) -> int:
        return len(self.elements)


class ModelPrediction(ExactModel):
    t: int
    k: int
    fpf_fraction: ExactFraction

    @field_validator("fpf_fraction")
    @classmethod
    def _proper_fraction(cls, value: Fraction) -> Fraction:
        if not 0 <= value < 1:
            raise ValueError("fixed-point-free fraction must lie in [0, 1)")
        return value


class HarnessReport(ExactModel):
    t: int
    k: int
    cap: int
    predicted: Optional[ExactFraction] = None
    observed: ExactFraction
    n_primes: int
    n_witnesses: int
    stderr: float
    existence_check: Optional[bool] = None
    density_check: Optional[bool] = None
    verdict: Literal["pass", "fail", "sieve-only"]


class RunConfig(BaseModel):
    """Every flag of one command-line invocation, with its default."""

    command: str
    action: Optional[str] = None
    poly: Optional[str] = None
    k: Optional[int] = None
    lo: int = 2
    hi: Optional[int] = None
    cap: Optional[int] = None
    witnesses: Optional[int] = None
    heuristic: bool = False
    kmax: Optional[int] = None
    next: int = 0
    t: Optional[str] = None
    group: Optional[str] = None
    cayley: Optional[str] = None
    perms: List[str] = Field(default_factory=list)
    max_order: Optional[int] = None
    cert: Optional[str] = None
    corpus: Optional[str] = None
    out: Optional[str] = None
    csv: Optional[str] = None
    cache_dir: Optional[str] = None
    use_cache: bool = True
    workers: Optional[int] = None
    timestamp: bool = True
    log_level: Optional[str] = None


class CorpusCase(BaseModel):
    name: str
    kind: Literal[
        "density",
        "witnesses",
        "ksearch_certified",
        "ksearch_heuristic",
        "ksearch_error",
        "capelli",
        "power_bound",
        "h2",
        "lemma23",
    ]
    params: Dict[str, Any] = Field(default_factory=dict)
    expect: Any = None
    tolerance: Optional[float] = None

    @model_validator(mode="after")
    def _check_shape(self):
        missing = [key for key in _REQUIRED_PARAMS[self.kind] if key not in self.params]
        if missing:
            raise ValueError(f"case {self.name!r} ({self.kind}) is missing parameters {missing}")
        for key, value in self.params.items():
            if key in _INT_PARAMS or (key == "t" and self.kind == "lemma23"):
                if not _is_int(value):
                    raise ValueError(f"case {self.name!r}: parameter {key!r} must be an integer, got {value!r}")
            elif key in ("poly", "group") and not isinstance(value, str):
                raise ValueError(f"case {self.name!r}: parameter {key!r} must be a string, got {value!r}")
            elif key == "t" and not (_is_int(value) or isinstance(value, str)):
                raise ValueError(f"case {self.name!r}: parameter 't' must be an integer or a rational string")

        if isinstance(self.expect, dict) and "error" in self.expect:
            if not isinstance(self.expect["error"], str):
                raise ValueError(f"case {self.name!r}: expected error must be an error name")
            return self
        if not _EXPECT_CHECKS[self.kind](self.expect):
            raise ValueError(f"case {self.name!r} ({self.kind}): unusable expectation {self.expect!r}")
        return self


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_fraction_text(value: Any) -> bool:
    if value is None or isinstance(value, bool):
        return False
    try:
        Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        return False
    return True


def _is_certificate_expectation(value: Any) -> bool:
    if value is None:
        return True
    return isinstance(value, dict) and all(_is_int(value[key]) for key in ("k", "first_witness") if key in value)


_REQUIRED_PARAMS: Dict[str, Tuple[str, ...]] = {
    "density": ("poly", "k", "hi"),
    "witnesses": ("poly", "k", "want", "cap"),
    "ksearch_certified": ("poly",),
    "ksearch_heuristic": ("poly",),
    "ksearch_error": ("poly",),
    "capelli": ("t", "k"),
    "power_bound": ("t",),
    "h2": ("group",),
    "lemma23": ("t", "k"),
}

_INT_PARAMS = {"k", "lo", "hi", "want", "cap", "witnesses", "kmax"}

# ksearch_error cases are accepted above only with an {"error": name} expectation
_EXPECT_CHECKS = {
    "density": _is_fraction_text,
    "witnesses": lambda v: isinstance(v, list) and all(_is_int(p) for p in v),
    "ksearch_certified": _is_certificate_expectation,
    "ksearch_heuristic": _is_certificate_expectation,
    "ksearch_error": lambda v: False,
    "capelli": lambda v: isinstance(v, bool),
    "power_bound": _is_int,
    "h2": lambda v: v in ("holds", "fails"),
    "lemma23": lambda v: v in ("pass", "fail", "sieve-only"),
}


class CorpusFile(BaseModel):
    schema_version: int = Field(1, alias="schema")
    cases: List[CorpusCase] = Field(min_length=1)


class CaseResult(BaseModel):
    name: str
    kind: str
    passed: bool
    detail: str


class CorpusSummary(BaseModel):
    total: int
    passed: int
    failed: int
    results: List[CaseResult]
