"""Pydantic models for everything bbops writes to disk.

Reports form a discriminated union on ``kind`` so a whole run document
round-trips through ``RunDocument.model_validate_json``.
"""

from enum import Enum
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from bbops.config_models import OperatorConfig
from bbops.functions import FunctionSpec
from bbops.version import __version__

BOUND_SLACK = 1e-9


class ReportModel(BaseModel):
    # infinite ratios are legitimate results
    model_config = ConfigDict(ser_json_inf_nan="constants")


class CheckReport(ReportModel):
    """Pass/fail record of one identity or inequality check."""

    kind: Literal["check"] = "check"
    name: str
    anchor: str
    passed: bool
    max_violation: float = 0.0
    tolerance: float = 0.0
    location: Dict[str, float] = Field(default_factory=dict)
    samples: int = 0
    details: Dict[str, float] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    # (x, residual) samples, filled on a closed-form mismatch
    residuals: List[Tuple[float, float]] = Field(default_factory=list)
    gating: bool = True


class BoundLemma(str, Enum):
    L7A = "L7a"
    L7B = "L7b"
    L8 = "L8"
    L9 = "L9"
    T2_RATIO = "T2-ratio"
    T3 = "T3"
    L8_TERMS = "L8-terms"
    L9_TERMS = "L9-terms"
    E2 = "E2"


class BoundReport(ReportModel):
    """Largest observed lhs/rhs ratio of an inequality over a sweep."""

    kind: Literal["bound"] = "bound"
    lemma: BoundLemma
    anchor: str
    max_ratio: float
    argmax_location: Dict[str, float] = Field(default_factory=dict)
    passed: bool
    slack: float = BOUND_SLACK
    gating: bool = True
    samples: int = 0
    curve: Optional[List[Tuple[float, float]]] = None

    @classmethod
    def from_ratio(
        cls,
        lemma: BoundLemma,
        anchor: str,
        max_ratio: float,
        location: Dict[str, float],
        slack: float = BOUND_SLACK,
        **kwargs: Any,
    ) -> "BoundReport":
        return cls(
            lemma=lemma,
            anchor=anchor,
            max_ratio=max_ratio,
            argmax_location=location,
            passed=bool(max_ratio <= 1.0 + slack),
            slack=slack,
            **kwargs,
        )


class RateRow(BaseModel):
    n: int
    sup_error: float


class RateReport(ReportModel):
    kind: Literal["rate"] = "rate"
    anchor: str = "Theorem 5 (direct side)"
    config_family: OperatorConfig
    f: FunctionSpec
    rows: List[RateRow]
    slope: Optional[float] = None
    intercept: Optional[float] = None
    r2: Optional[float] = None
    fit_start: int = 0


class MomentReport(ReportModel):
    kind: Literal["moment"] = "moment"
    anchor: str
    config: OperatorConfig
    x: float
    j: int
    closed_form: float
    direct_sum: float
    abs_gap: float


class ModulusRow(BaseModel):
    t: float
    omega: float


class ModulusFit(ReportModel):
    kind: Literal["modulus"] = "modulus"
    anchor: str = "Theorem 5 (modulus side)"
    f: FunctionSpec
    lam: float
    rows: List[ModulusRow]
    gamma_hat: Optional[float] = None
    r2: Optional[float] = None


class LimitRow(BaseModel):
    n: int
    deviations: List[float]


class LimitRecord(ReportModel):
    """Per-n maximal deviations from a limit, one column per sum."""

    kind: Literal["limits"] = "limits"
    name: str
    anchor: str
    alpha: float
    beta: float = 0.0
    columns: List[str]
    rows: List[LimitRow]
    passed: bool
    notes: List[str] = Field(default_factory=list)


class Lemma3Sums(ReportModel):
    kind: Literal["lemma3"] = "lemma3"
    anchor: str = "Lemma 3"
    n: int
    x: float
    s1: float
    s1_closed: float
    s2: float
    s2_corrected: float
    s2_direct: float


class EquivalenceRecord(ReportModel):
    kind: Literal["equivalence"] = "equivalence"
    anchor: str = "Theorem 5"
    f: FunctionSpec
    lam: float
    alpha: float
    beta: float
    rate_exp: float
    modulus_exp: float
    gap: float
    tolerance: float
    passed: bool


Report = Annotated[
    Union[
        CheckReport,
        BoundReport,
        RateReport,
        MomentReport,
        ModulusFit,
        LimitRecord,
        Lemma3Sums,
        EquivalenceRecord,
    ],
    Field(discriminator="kind"),
]


class RunDocument(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    tool_version: str = __version__
    command: str
    params: Dict[str, Any] = Field(default_factory=dict)
    reports: List[Report] = Field(default_factory=list)

    def failed_reports(self) -> List[Any]:
        """Gating reports that carry ``passed=False``."""
        failed = []
        for report in self.reports:
            if getattr(report, "gating", True) and getattr(report, "passed", True) is False:
                failed.append(report)
        return failed
