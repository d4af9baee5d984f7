"""Theorem-level experiments: convergence rates, explicit bounds and derivative suites.

Each sweep returns one report whose ``max_ratio`` is the largest lhs/rhs
ratio seen; a bound holds on the sweep when that ratio stays below one.
"""

import logging
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from bbops.config_models import (
    GridSpec,
    OperatorConfig,
    OperatorVariant,
    QuadratureSpec,
)
from bbops.core.operators import (
    apply,
    apply_deriv,
    central_second_moment,
    derivative_terms,
    grid_points,
    lemma7_ratios,
)
from bbops.core.parallel import sweep_map
from bbops.core.smoothness import (
    ModulusQuery,
    classical_modulus,
    dt_modulus,
    loglog_fit,
    modulus_exponent,
    sup_norm,
    weighted_sup_norm,
)
from bbops.errors import DegenerateFitError, NotC1Error, NotInWLambdaError
from bbops.functions import FunctionSpec
from bbops.report_models import (
    BOUND_SLACK,
    BoundLemma,
    BoundReport,
    EquivalenceRecord,
    RateReport,
    RateRow,
)

logger = logging.getLogger(__name__)

# transient rows left out of rate fits
FIT_SKIP = 3
# lhs values treated as exact zeros when the rhs vanishes
ZERO_LHS = 1e-12

Location = Dict[str, float]


def _ratio(lhs: np.ndarray, rhs) -> np.ndarray:
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), lhs.shape)
    out = np.zeros_like(lhs)
    positive = rhs > 0.0
    out[positive] = lhs[positive] / rhs[positive]
    out[~positive & (lhs > ZERO_LHS)] = np.inf
    return out


def _worst(results: Sequence[Tuple[float, Location]]) -> Tuple[float, Location]:
    best = (0.0, {})
    for ratio, location in results:
        if ratio > best[0] or not best[1]:
            best = (ratio, location)
    return best


def _phi_pow(x: np.ndarray, power: float) -> np.ndarray:
    return np.sqrt(x * (1.0 - x)) ** power


def sup_error(
    config: OperatorConfig,
    f: FunctionSpec,
    grid: GridSpec,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """sup_x |L f(x) - f(x)|."""
    return sup_norm(lambda u: apply(config, f, u, quad) - f(u), grid)


def convergence_table(
    config_family: OperatorConfig,
    f: FunctionSpec,
    n_list: Sequence[int],
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    threads: Optional[int] = None,
) -> RateReport:
    """sup-norm error per n and the log-log slope over the non-transient rows."""
    grid = grid or GridSpec()
    ns = sorted(set(int(n) for n in n_list))
    errors = sweep_map(
        lambda n: sup_error(config_family.with_n(n), f, grid, quad), ns, threads
    )
    rows = [RateRow(n=n, sup_error=e) for n, e in zip(ns, errors)]
    fit_start = FIT_SKIP if len(rows) - FIT_SKIP >= 2 else 0
    slope = intercept = r2 = None
    try:
        slope, intercept, r2 = loglog_fit(
            [r.n for r in rows[fit_start:]], [r.sup_error for r in rows[fit_start:]]
        )
        logger.info(
            "Rate of %s for %s: slope %.4f (r2 %.4f)",
            config_family.variant.value,
            f.label,
            slope,
            r2,
        )
    except DegenerateFitError as e:
        logger.info("No rate fit for %s: %s", f.label, e)
    return RateReport(
        config_family=config_family,
        f=f,
        rows=rows,
        slope=slope,
        intercept=intercept,
        r2=r2,
        fit_start=fit_start,
    )


def theorem3_ratio(
    config: OperatorConfig,
    f: FunctionSpec,
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    if not f.c1 or f.derivative is None:
        raise NotC1Error(f"{f.label} has no registered continuous derivative")
    grid = grid or GridSpec()
    n, alpha, beta = config.n, config.alpha, config.beta
    lhs = sup_error(config, f, grid, quad)
    c = (14.0 + beta**2) * alpha / 4.0
    df = f.derivative
    rhs = np.sqrt(c / n) * (
        sup_norm(df, grid) + classical_modulus(df, n**-0.5, grid) * (1.0 + np.sqrt(c))
    )
    return float(_ratio(np.array([lhs]), rhs)[0])


def theorem3_check(
    config: OperatorConfig,
    f: FunctionSpec,
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
) -> BoundReport:
    """Explicit C^1 error bound at one configuration."""
    ratio = theorem3_ratio(config, f, grid, quad)
    return BoundReport.from_ratio(
        BoundLemma.T3,
        "Theorem 3",
        ratio,
        {"n": config.n, "alpha": config.alpha, "beta": config.beta},
        samples=1,
    )


def theorem3_sweep(
    functions: Sequence[FunctionSpec],
    n_list: Sequence[int],
    alphas: Sequence[float],
    betas: Sequence[float],
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    slack: float = BOUND_SLACK,
    threads: Optional[int] = None,
) -> BoundReport:
    tuples = list(product(range(len(functions)), n_list, alphas, betas))

    def run(item):
        i, n, alpha, beta = item
        config = OperatorConfig(
            variant=OperatorVariant.GENERALIZED, n=n, alpha=alpha, beta=beta
        )
        location = {"n": n, "alpha": alpha, "beta": beta, "f": float(i)}
        return theorem3_ratio(config, functions[i], grid, quad), location

    ratio, location = _worst(sweep_map(run, tuples, threads))
    return BoundReport.from_ratio(
        BoundLemma.T3, "Theorem 3", ratio, location, slack=slack, samples=len(tuples)
    )


def _omega_table(
    f: FunctionSpec, lam: float, t_values: np.ndarray, grid: GridSpec
) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = float(np.min(t_values)), float(np.max(t_values))
    ts = np.array([lo]) if hi <= lo * (1.0 + 1e-12) else np.geomspace(lo, hi, 48)
    omegas = np.array(
        [dt_modulus(ModulusQuery(f=f, lam=lam, t=min(float(t), 1.0), grid=grid)) for t in ts]
    )
    return ts, omegas


def theorem2_ratio_curve(
    config_family: OperatorConfig,
    f: FunctionSpec,
    lam: float,
    n_list: Sequence[int],
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    threads: Optional[int] = None,
) -> List[Tuple[float, float, float]]:
    """(n, R(n), argmax x) with R(n) = sup |L f - f| / omega(f; phi^(1-lam)(x)/sqrt(n)).

    The modulus is tabulated on a geometric t grid and read at the largest
    tabulated t not exceeding the wanted one, which can only raise R.
    """
    grid = grid or GridSpec()
    xs_all = grid_points(grid)

    def run(n: int) -> Tuple[float, float, float]:
        xs = xs_all[_phi_pow(xs_all, 1.0) >= 1.0 / n]
        lhs = np.abs(apply(config_family.with_n(n), f, xs, quad) - f(xs))
        t_x = _phi_pow(xs, 1.0 - lam) / np.sqrt(n)
        ts, omegas = _omega_table(f, lam, t_x, grid)
        idx = np.clip(np.searchsorted(ts, t_x * (1.0 + 1e-12), side="right") - 1, 0, None)
        ratios = _ratio(lhs, omegas[idx])
        i = int(np.argmax(ratios))
        return float(n), float(ratios[i]), float(xs[i])

    return sweep_map(run, sorted(n_list), threads)


def theorem2_ratio_scan(
    config_family: OperatorConfig,
    f: FunctionSpec,
    lam: float,
    n_list: Sequence[int],
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    slack: float = BOUND_SLACK,
    threads: Optional[int] = None,
) -> BoundReport:
    """Boundedness of the direct-estimate ratio: max R(n) <= 10 * median R(n)."""
    curve = theorem2_ratio_curve(config_family, f, lam, n_list, grid, quad, threads)
    ratios = np.array([r for _, r, _ in curve])
    median = float(np.median(ratios)) if ratios.size else 0.0
    i = int(np.argmax(ratios)) if ratios.size else 0
    if median > 0.0:
        normalized = float(ratios[i]) / (10.0 * median)
    else:
        normalized = 0.0 if not ratios.size or ratios[i] == 0.0 else float("inf")
    location = {"lambda": lam, "alpha": config_family.alpha, "beta": config_family.beta}
    if curve:
        location.update(n=curve[i][0], x=curve[i][2])
    return BoundReport.from_ratio(
        BoundLemma.T2_RATIO,
        "Theorem 2",
        normalized,
        location,
        slack=slack,
        samples=len(curve),
        curve=[(n, r) for n, r, _ in curve],
    )


def equivalence_check(
    f: FunctionSpec,
    lam: float,
    alpha: float,
    beta: float,
    n_list: Sequence[int],
    t_list: Sequence[float],
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    tolerance: float = 0.15,
    threads: Optional[int] = None,
    rate: Optional[RateReport] = None,
) -> EquivalenceRecord:
    """Twice the convergence exponent against the modulus exponent.

    A convergence table already computed for the same family can be passed
    as ``rate``.
    """
    if rate is None:
        config = OperatorConfig(
            variant=OperatorVariant.GENERALIZED,
            n=max(2, min(n_list)),
            alpha=alpha,
            beta=beta,
        )
        rate = convergence_table(config, f, n_list, grid, quad, threads)
    if rate.slope is None:
        raise DegenerateFitError(f"no convergence rate for {f.label}")
    rate_exp = -rate.slope
    modulus_exp, _ = modulus_exponent(f, lam, t_list, grid)
    gap = abs(2.0 * rate_exp - modulus_exp)
    passed = bool(gap <= tolerance)
    if not passed:
        logger.warning(
            "Exponents of %s disagree: 2*%.4f vs %.4f", f.label, rate_exp, modulus_exp
        )
    return EquivalenceRecord(
        f=f,
        lam=lam,
        alpha=alpha,
        beta=beta,
        rate_exp=rate_exp,
        modulus_exp=modulus_exp,
        gap=gap,
        tolerance=tolerance,
        passed=passed,
    )


def derivative_points(n: int, grid: GridSpec) -> np.ndarray:
    """E_n grid plus the two points at distance 1/(2n) from the ends."""
    inner = np.linspace(1.0 / n, 1.0 - 1.0 / n, grid.points)
    return np.concatenate([[0.5 / n], inner, [1.0 - 0.5 / n]])


def _generalized(n: int, alpha: float, beta: float) -> OperatorConfig:
    return OperatorConfig(variant=OperatorVariant.GENERALIZED, n=n, alpha=alpha, beta=beta)


def _derivative_sweep(
    functions: Sequence[FunctionSpec],
    lambdas: Sequence[float],
    n_list: Sequence[int],
    alphas: Sequence[float],
    betas: Sequence[float],
    grid: GridSpec,
    quad: Optional[QuadratureSpec],
    threads: Optional[int],
    ratios_for,
) -> Tuple[Tuple[float, Location], Tuple[float, Location], int]:
    """Run ``ratios_for`` over every tuple; returns the worst (total, terms) ratios."""
    tuples = list(product(range(len(functions)), n_list, alphas, betas))

    def run(item):
        i, n, alpha, beta = item
        config = _generalized(n, alpha, beta)
        xs = derivative_points(n, grid)
        out_total, out_terms = [], []
        for lam in lambdas:
            total, terms = ratios_for(config, functions[i], lam, xs)
            location = {"n": n, "alpha": alpha, "beta": beta, "lambda": lam, "f": float(i)}
            jt, jm = int(np.argmax(total)), int(np.argmax(terms))
            out_total.append((float(total[jt]), dict(location, x=float(xs[jt]))))
            out_terms.append((float(terms[jm]), dict(location, x=float(xs[jm]))))
        return _worst(out_total), _worst(out_terms)

    results = sweep_map(run, tuples, threads)
    samples = len(tuples) * len(lambdas) * (grid.points + 2)
    return _worst([r[0] for r in results]), _worst([r[1] for r in results]), samples


def lemma8_suite(
    functions: Sequence[FunctionSpec],
    lambdas: Sequence[float],
    n_list: Sequence[int],
    alphas: Sequence[float] = (1.0, 2.0, 3.0),
    betas: Sequence[float] = (0.0, 0.5, 1.0),
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    slack: float = BOUND_SLACK,
    threads: Optional[int] = None,
) -> Tuple[BoundReport, BoundReport]:
    """|phi^lam (L f)'| <= 15 alpha phi^(lam-1) sqrt(n) ||f||, plus its three-term split.

    Returns the gating bound report and the non-gating report on the split
    (end terms against alpha, the interior sum against 12 alpha).
    """
    grid = grid or GridSpec(points=201)
    norms = {f: sup_norm(f, grid) for f in functions}

    def ratios_for(config, f, lam, xs):
        scale = config.alpha * np.sqrt(config.n) * norms[f] * _phi_pow(xs, lam - 1.0)
        weight = _phi_pow(xs, lam)
        total = _ratio(weight * np.abs(apply_deriv(config, f, xs, quad)), 15.0 * scale)
        first, middle, last = derivative_terms(config, f, xs, quad=quad)
        terms = np.maximum.reduce(
            [
                _ratio(weight * np.abs(first), scale),
                _ratio(weight * np.abs(middle), 12.0 * scale),
                _ratio(weight * np.abs(last), scale),
            ]
        )
        return total, terms

    (ratio, location), (term_ratio, term_location), samples = _derivative_sweep(
        functions, lambdas, n_list, alphas, betas, grid, quad, threads, ratios_for
    )
    if ratio > 1.0 + slack:
        logger.warning("Derivative bound violated: ratio %.6f at %s", ratio, location)
    return (
        BoundReport.from_ratio(
            BoundLemma.L8, "Lemma 8", ratio, location, slack=slack, samples=samples
        ),
        BoundReport.from_ratio(
            BoundLemma.L8_TERMS,
            "Lemma 8 (term estimates)",
            term_ratio,
            term_location,
            slack=slack,
            samples=samples,
            gating=False,
        ),
    )


def lemma9_suite(
    functions: Sequence[FunctionSpec],
    lambdas: Sequence[float],
    n_list: Sequence[int],
    alphas: Sequence[float] = (1.0, 2.0),
    betas: Sequence[float] = (0.0, 0.5, 1.0),
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    slack: float = BOUND_SLACK,
    threads: Optional[int] = None,
) -> Tuple[BoundReport, BoundReport]:
    """|phi^lam (L f)'| <= 104 alpha ||phi^lam f'|| for f in W_lambda, plus its split.

    The split subtracts f(x) from every coefficient; end terms are measured
    against 4 alpha and the interior sum against 96 alpha.
    """
    for f in functions:
        if not f.w_lambda_member or f.derivative is None:
            raise NotInWLambdaError(f"{f.label} is not tagged as a W_lambda member")
    grid = grid or GridSpec(points=201)
    norms = {
        (f, lam): weighted_sup_norm(f.derivative, lam, grid)
        for f in functions
        for lam in lambdas
    }

    def ratios_for(config, f, lam, xs):
        scale = config.alpha * norms[(f, lam)]
        weight = _phi_pow(xs, lam)
        total = _ratio(weight * np.abs(apply_deriv(config, f, xs, quad)), 104.0 * scale)
        first, middle, last = derivative_terms(config, f, xs, centered=True, quad=quad)
        terms = np.maximum.reduce(
            [
                _ratio(weight * np.abs(first), 4.0 * scale),
                _ratio(weight * np.abs(middle), 96.0 * scale),
                _ratio(weight * np.abs(last), 4.0 * scale),
            ]
        )
        return total, terms

    (ratio, location), (term_ratio, term_location), samples = _derivative_sweep(
        functions, lambdas, n_list, alphas, betas, grid, quad, threads, ratios_for
    )
    if ratio > 1.0 + slack:
        logger.warning("Weighted derivative bound violated: ratio %.6f at %s", ratio, location)
    return (
        BoundReport.from_ratio(
            BoundLemma.L9, "Lemma 9", ratio, location, slack=slack, samples=samples
        ),
        BoundReport.from_ratio(
            BoundLemma.L9_TERMS,
            "Lemma 9 (term estimates)",
            term_ratio,
            term_location,
            slack=slack,
            samples=samples,
            gating=False,
        ),
    )


def lemma7_sweep(
    n_list: Sequence[int],
    alphas: Sequence[float] = (1.0, 2.0, 3.0),
    betas: Sequence[float] = (0.0, 0.5, 1.0),
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
    slack: float = BOUND_SLACK,
    threads: Optional[int] = None,
) -> Tuple[BoundReport, BoundReport]:
    """Central second moment against the uniform bound and the phi^2 bound on E_n."""
    grid = grid or GridSpec(points=201)
    tuples = list(product(n_list, alphas, betas))

    def run(item):
        n, alpha, beta = item
        xs, ratio_a, xe, ratio_b = lemma7_ratios(_generalized(n, alpha, beta), grid, quad)
        ia, ib = int(np.argmax(ratio_a)), int(np.argmax(ratio_b))
        location = {"n": n, "alpha": alpha, "beta": beta}
        return (
            (float(ratio_a[ia]), dict(location, x=float(xs[ia]))),
            (float(ratio_b[ib]), dict(location, x=float(xe[ib]))),
        )

    results = sweep_map(run, tuples, threads)
    worst_a = _worst([r[0] for r in results])
    worst_b = _worst([r[1] for r in results])
    samples = len(tuples) * grid.points
    return (
        BoundReport.from_ratio(
            BoundLemma.L7A, "Lemma 7(1)", *worst_a, slack=slack, samples=samples
        ),
        BoundReport.from_ratio(
            BoundLemma.L7B, "Lemma 7(2)", *worst_b, slack=slack, samples=samples
        ),
    )


def beta_bernstein_central_report(
    n_list: Sequence[int],
    betas: Sequence[float] = (0.0, 0.5, 1.0),
    grid: Optional[GridSpec] = None,
    quad: Optional[QuadratureSpec] = None,
) -> BoundReport:
    """E_{n-1,beta}((t - x)^2; x) <= 2 phi^2(x) / (n - 1), reported without gating."""
    grid = grid or GridSpec(points=201)
    xs = grid_points(grid)[1:-1]
    results = []
    for n, beta in product(n_list, betas):
        if n < 3:
            continue
        config = OperatorConfig(variant=OperatorVariant.BETA_BERNSTEIN, n=n - 1, beta=beta)
        ratio = _ratio(
            central_second_moment(config, xs, quad), 2.0 * xs * (1.0 - xs) / (n - 1)
        )
        i = int(np.argmax(ratio))
        results.append((float(ratio[i]), {"n": n, "beta": beta, "x": float(xs[i])}))
    ratio, location = _worst(results)
    return BoundReport.from_ratio(
        BoundLemma.E2,
        "Beta-Bernstein central moment",
        ratio,
        location,
        gating=False,
        samples=len(results) * xs.size,
    )
