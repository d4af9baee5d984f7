"""Verification suites run by ``bbops verify``.

A suite is an ordered list of named steps; every step returns the reports
it produced, and the suite runner collects them in step order.
"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from bbops.config_models import (
    AppConfig,
    GridSpec,
    OperatorConfig,
    OperatorVariant,
    QuadratureSpec,
)
from bbops.core import beta_functional, experiments, operators
from bbops.functions import abs_half, holder, polynomial, registry, sin_pi
from bbops.report_models import CheckReport, Report

logger = logging.getLogger(__name__)

SUITE_NAMES = ("lemmas", "derivatives", "theorems", "all")

DOUBLING_16_4096 = [2**p for p in range(4, 13)]
DOUBLING_16_8192 = [2**p for p in range(4, 14)]
DOUBLING_4_256 = [2**p for p in range(2, 9)]
T_HALVING = [2.0**-p for p in range(3, 13)]


class SuiteContext(BaseModel):
    grid: GridSpec
    quad: QuadratureSpec
    slack: float
    moment_tolerance: float
    equivalence_tolerance: float
    rate_slack: float
    threads: Optional[int] = None
    sweep_grid: GridSpec = Field(default_factory=lambda: GridSpec(points=201))

    @classmethod
    def from_config(cls, config: AppConfig, slack: Optional[float] = None) -> "SuiteContext":
        return cls(
            grid=config.grid,
            quad=config.quadrature,
            slack=config.checks.bound_slack if slack is None else slack,
            moment_tolerance=config.checks.moment_tolerance,
            equivalence_tolerance=config.checks.equivalence_tolerance,
            rate_slack=config.checks.rate_slack,
            threads=config.threads,
        )


Step = Callable[[SuiteContext], List[Report]]


def _lemma1(ctx: SuiteContext) -> List[Report]:
    return [beta_functional.lemma1_check(quad=ctx.quad, tolerance=ctx.moment_tolerance)]


def _lemma2(ctx: SuiteContext) -> List[Report]:
    return [operators.lemma2_check(tolerance=ctx.moment_tolerance, quad=ctx.quad)]


def _lemma3(ctx: SuiteContext) -> List[Report]:
    return [
        operators.lemma3_check(tolerance=ctx.moment_tolerance),
        operators.lemma3_sums(2, 0.5),
        operators.lemma3_sums(200, 0.5),
    ]


def _lemma4(ctx: SuiteContext) -> List[Report]:
    return [
        operators.lemma4_limits(alpha, DOUBLING_16_4096, ctx.sweep_grid)
        for alpha in (1.0, 2.0)
    ]


def _lemma5(ctx: SuiteContext) -> List[Report]:
    return [operators.lemma5_check(grid=ctx.sweep_grid)]


def _lemma6(ctx: SuiteContext) -> List[Report]:
    family = OperatorConfig(variant=OperatorVariant.GENERALIZED, alpha=2.0, beta=0.5)
    return [operators.lemma6_korovkin(family, DOUBLING_16_4096, ctx.sweep_grid, ctx.quad)]


def _lemma7(ctx: SuiteContext) -> List[Report]:
    return list(
        experiments.lemma7_sweep(
            range(2, 51), grid=ctx.sweep_grid, quad=ctx.quad, slack=ctx.slack, threads=ctx.threads
        )
    )


def _reductions(ctx: SuiteContext) -> List[Report]:
    return [
        operators.beta_zero_reduction(10, 2.0, sin_pi(), ctx.sweep_grid),
        operators.bernstein_central_check(grid=ctx.sweep_grid),
        experiments.beta_bernstein_central_report(
            range(3, 51), grid=ctx.sweep_grid, quad=ctx.quad
        ),
    ]


def _derivative_consistency(ctx: SuiteContext) -> List[Report]:
    configs = [
        OperatorConfig(variant=OperatorVariant.GENERALIZED, n=n, alpha=alpha, beta=beta)
        for n in (4, 16, 32)
        for alpha, beta in ((1.0, 0.0), (2.0, 0.5), (3.0, 1.0))
    ] + [OperatorConfig(variant=OperatorVariant.BERNSTEIN_BEZIER, n=16, alpha=2.0)]
    functions = [polynomial([0.0, 0.0, 1.0]), sin_pi()]
    return [
        operators.derivative_consistency_check(configs, functions, points=25, quad=ctx.quad)
    ]


def _lemma8(ctx: SuiteContext) -> List[Report]:
    return list(
        experiments.lemma8_suite(
            registry(),
            (0.0, 0.5, 1.0),
            DOUBLING_4_256,
            grid=ctx.sweep_grid,
            quad=ctx.quad,
            slack=ctx.slack,
            threads=ctx.threads,
        )
    )


def _lemma9(ctx: SuiteContext) -> List[Report]:
    members = [f for f in registry() if f.w_lambda_member]
    return list(
        experiments.lemma9_suite(
            members,
            (0.0, 0.5, 1.0),
            DOUBLING_4_256,
            alphas=(1.0, 2.0, 3.0),
            grid=ctx.sweep_grid,
            quad=ctx.quad,
            slack=ctx.slack,
            threads=ctx.threads,
        )
    )


def _theorem3(ctx: SuiteContext) -> List[Report]:
    return [
        experiments.theorem3_sweep(
            [polynomial([0.0, 0.0, 1.0]), sin_pi()],
            DOUBLING_4_256,
            (1.0, 2.0),
            (0.0, 1.0),
            grid=ctx.grid,
            quad=ctx.quad,
            slack=ctx.slack,
            threads=ctx.threads,
        )
    ]


def _theorem2(ctx: SuiteContext) -> List[Report]:
    family = OperatorConfig(variant=OperatorVariant.GENERALIZED, alpha=1.0, beta=0.5)
    return [
        experiments.theorem2_ratio_scan(
            family, f, lam, DOUBLING_16_4096, ctx.sweep_grid, ctx.quad, ctx.slack, ctx.threads
        )
        for f, lam in ((abs_half(), 1.0), (polynomial([0.0, 0.0, 1.0]), 0.0))
    ]


def rate_check(rate, gamma: float, slack: float) -> CheckReport:
    """Fitted slope against -gamma/2."""
    name = f"rate:{rate.f.label}"
    if rate.slope is None:
        return CheckReport(
            name=name,
            anchor="Theorem 2",
            passed=False,
            tolerance=slack,
            location={"gamma": gamma},
            samples=len(rate.rows),
            notes=["no usable rows for a slope fit"],
        )
    gap = abs(rate.slope + gamma / 2.0)
    return CheckReport(
        name=name,
        anchor="Theorem 2",
        passed=bool(gap <= slack),
        max_violation=gap,
        tolerance=slack,
        location={"gamma": gamma, "slope": rate.slope},
        samples=len(rate.rows),
    )


def _rates_and_equivalence(ctx: SuiteContext) -> List[Report]:
    family = OperatorConfig(variant=OperatorVariant.GENERALIZED, alpha=1.0, beta=0.5)
    reports: List[Report] = []
    for f, gamma in ((abs_half(), 1.0), (holder(0.5), 0.5)):
        rate = experiments.convergence_table(
            family, f, DOUBLING_16_8192, ctx.grid, ctx.quad, ctx.threads
        )
        reports.append(rate)
        reports.append(rate_check(rate, gamma, ctx.rate_slack))
        reports.append(
            experiments.equivalence_check(
                f,
                1.0,
                family.alpha,
                family.beta,
                DOUBLING_16_8192,
                T_HALVING,
                ctx.grid,
                ctx.quad,
                tolerance=ctx.equivalence_tolerance,
                threads=ctx.threads,
                rate=rate,
            )
        )
    return reports


SUITES: Dict[str, Sequence[Tuple[str, Step]]] = {
    "lemmas": (
        ("Functional moments", _lemma1),
        ("Operator moments", _lemma2),
        ("Bezier-basis sums", _lemma3),
        ("Asymptotic sums", _lemma4),
        ("Basis domination", _lemma5),
        ("Korovkin limits", _lemma6),
        ("Central moment bounds", _lemma7),
        ("Reductions and central moments", _reductions),
    ),
    "derivatives": (
        ("Derivative consistency", _derivative_consistency),
        ("Derivative bound", _lemma8),
        ("Weighted derivative bound", _lemma9),
    ),
    "theorems": (
        ("Explicit C1 bound", _theorem3),
        ("Direct-estimate ratio", _theorem2),
        ("Rates and equivalence", _rates_and_equivalence),
    ),
}


def suite_steps(name: str) -> List[Tuple[str, Step]]:
    if name == "all":
        return [step for key in ("lemmas", "derivatives", "theorems") for step in SUITES[key]]
    if name not in SUITES:
        raise ValueError(f"Unknown suite '{name}'. Use one of: {', '.join(SUITE_NAMES)}")
    return list(SUITES[name])


def run_suite(
    name: str,
    ctx: SuiteContext,
    on_step: Optional[Callable[[str], None]] = None,
) -> List[Report]:
    """Run every step of a suite in order and collect their reports."""
    reports: List[Report] = []
    for title, step in suite_steps(name):
        logger.info("Running %s", title)
        produced = step(ctx)
        for report in produced:
            if getattr(report, "gating", True) and getattr(report, "passed", True) is False:
                logger.warning("%s failed: %s", title, getattr(report, "anchor", ""))
        reports.extend(produced)
        if on_step:
            on_step(title)
    return reports
