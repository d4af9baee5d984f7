from enum import Enum
from typing import Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator


class OperatorVariant(str, Enum):
    BERNSTEIN = "bernstein"
    BERNSTEIN_BEZIER = "bernstein-bezier"
    BETA_BERNSTEIN = "beta-bernstein"
    GENERALIZED = "generalized"


class OperatorConfig(BaseModel):
    """Operator variant tag plus its parameters (n, alpha, beta).

    Parameters a variant ignores are normalized to alpha=1 / beta=0 so that
    two configs describing the same operator compare equal.
    """

    model_config = ConfigDict(frozen=True)

    variant: OperatorVariant = OperatorVariant.GENERALIZED
    n: int = Field(default=10, ge=2)
    alpha: float = Field(default=1.0, ge=1.0)
    beta: float = Field(default=0.0, ge=0.0, le=1.0)

    @model_validator(mode="before")
    @classmethod
    def _normalize_irrelevant(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        variant = OperatorVariant(data.get("variant", OperatorVariant.GENERALIZED))
        if variant in (OperatorVariant.BERNSTEIN, OperatorVariant.BETA_BERNSTEIN):
            data["alpha"] = 1.0
        if variant in (OperatorVariant.BERNSTEIN, OperatorVariant.BERNSTEIN_BEZIER):
            data["beta"] = 0.0
        return data

    def with_n(self, n: int) -> "OperatorConfig":
        return OperatorConfig(
            variant=self.variant, n=n, alpha=self.alpha, beta=self.beta
        )

    @property
    def label(self) -> str:
        return f"{self.variant.value}(n={self.n}, alpha={self.alpha:g}, beta={self.beta:g})"


class QuadratureStrategy(str, Enum):
    EXACT_POLY = "exact-poly"
    WINDOWED_GAUSS = "windowed-gauss"
    FULL_COMPOSITE = "full-composite"


class QuadratureSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    strategy: QuadratureStrategy = QuadratureStrategy.WINDOWED_GAUSS
    nodes: int = Field(default=16, ge=4)
    panels: int = Field(default=8, ge=1)
    window_sigmas: float = Field(default=12.0, gt=0.0)
    tolerance: float = Field(default=1e-8, gt=0.0)
    max_doublings: int = Field(default=6, ge=0)
    # geometric grading toward singular points of the integrand
    grading_ratio: float = Field(default=0.15, gt=0.0, lt=1.0)
    grading_levels: int = Field(default=12, ge=0)


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    points: int = Field(default=2001, ge=11)
    refine: int = Field(default=40, ge=0)


class CheckSettings(BaseModel):
    bound_slack: float = 1e-9
    moment_tolerance: float = 1e-10
    equivalence_tolerance: float = 0.15
    rate_slack: float = 0.1


class LoggingSettings(BaseModel):
    level: str = "INFO"


class AppConfig(BaseModel):
    grid: GridSpec = Field(default_factory=GridSpec)
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)
    checks: CheckSettings = Field(default_factory=CheckSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    threads: Optional[int] = Field(default=None, ge=1)

    def to_yaml(self) -> str:
        """Convert config to YAML string."""
        return yaml.dump(
            self.model_dump(mode="json"), default_flow_style=False, sort_keys=False
        )
