"""Subcommand logic behind the bbops CLI.

Each ``run_*`` function loads the configuration, computes its reports,
prints them, writes the requested files and exits with 0 (success),
1 (a gating check failed) or 2 (usage, parse or IO error).
"""

import logging
import sys
from typing import Any, Dict, List, NoReturn, Optional

import numpy as np
from pydantic import BaseModel, ValidationError

from bbops.bbops_config import BbopsSettings
from bbops.cli.parsing import parse_function, parse_n_list, parse_t_list, parse_x_list
from bbops.cli.ui import (
    console,
    create_progress_bar,
    show_error,
    show_modulus_table,
    show_operation_summary,
    show_rate_table,
    show_reports_table,
)
from bbops.cli.validation import (
    validate_derivative_request,
    validate_operator_options,
    validate_points,
)
from bbops.config_models import AppConfig, GridSpec, OperatorConfig, OperatorVariant
from bbops.core import experiments, operators, suites
from bbops.core.smoothness import modulus_fit
from bbops.errors import BbopsError
from bbops.report_models import Report, RunDocument
from bbops.report_writer import plot_series, render_csv, render_json, render_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

DEFAULT_N_LIST = "16:8192:x2"
DEFAULT_T_LIST = "0.125:0.000244140625:x0.5"


class OutputPaths(BaseModel):
    json_path: Optional[str] = None
    csv_path: Optional[str] = None
    svg_path: Optional[str] = None


def usage_error(message: str) -> NoReturn:
    show_error(message)
    sys.exit(EXIT_USAGE)


def prepare(config_path: Optional[str], verbose: Optional[bool]) -> AppConfig:
    """Load the configuration and set the root log level."""
    try:
        config = BbopsSettings.load_config(config_path)
    except (FileNotFoundError, ValueError, ValidationError) as e:
        usage_error(f"Error loading configuration: {e}")

    level = "DEBUG" if verbose else config.logging.level
    logging.basicConfig(format=LOG_FORMAT)
    try:
        logging.getLogger().setLevel(getattr(logging, level.upper()))
    except AttributeError:
        usage_error(f"Unknown log level '{level}'")
    if level.upper() == "DEBUG":
        logger.debug("Verbose logging enabled.")
    return config


def _grid(config: AppConfig, points: Optional[int]) -> GridSpec:
    if points is None:
        return config.grid
    if points < 11:
        usage_error(f"--grid must be at least 11 points, got {points}")
    return GridSpec(points=points, refine=config.grid.refine)


def _check(errors: List[str]) -> None:
    if errors:
        usage_error("; ".join(errors))


def _operator(variant: OperatorVariant, n: int, alpha: float, beta: float) -> OperatorConfig:
    _check(validate_operator_options(variant, [n], alpha, beta))
    return OperatorConfig(variant=variant, n=n, alpha=alpha, beta=beta)


def write_outputs(document: RunDocument, outputs: OutputPaths) -> None:
    """Render every requested file, then write them in one pass."""
    files: Dict[str, str] = {}
    if outputs.json_path:
        files[outputs.json_path] = render_json(document)
    if outputs.csv_path:
        files[outputs.csv_path] = render_csv(document.reports)
    if outputs.svg_path:
        plot = plot_series(document.reports)
        if plot is None:
            logger.warning(
                "Nothing to plot for %s; skipping %s", document.command, outputs.svg_path
            )
        else:
            series, title, x_label, y_label = plot
            files[outputs.svg_path] = render_svg(series, title, x_label, y_label)

    for path, text in files.items():
        try:
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            usage_error(f"Cannot write {path}: {e}")
        logger.info("Wrote %s", path)


def finish(document: RunDocument, outputs: OutputPaths) -> NoReturn:
    write_outputs(document, outputs)
    failed = document.failed_reports()
    if failed:
        console.print(f"[bold red]{len(failed)} check(s) failed[/bold red]")
        sys.exit(EXIT_FAILED_CHECK)
    sys.exit(EXIT_OK)


def _document(command: str, params: Dict[str, Any], reports: List[Report]) -> RunDocument:
    return RunDocument(command=command, params=params, reports=reports)


def run_eval(
    variant: OperatorVariant,
    n: int,
    alpha: float,
    beta: float,
    fn: str,
    x: str,
    deriv: bool,
    outputs: OutputPaths,
    config_path: Optional[str] = None,
    verbose: Optional[bool] = None,
) -> NoReturn:
    """Print the operator value (and derivative) at each x, one line per point."""
    config = prepare(config_path, verbose)
    try:
        f = parse_function(fn)
        xs = parse_x_list(x)
        _check(validate_points(xs))
        if deriv:
            _check(validate_derivative_request(variant))
        op = _operator(variant, n, alpha, beta)
        values = np.atleast_1d(operators.apply(op, f, np.array(xs), config.quadrature))
        derivs = None
        if deriv:
            derivs = np.atleast_1d(operators.apply_deriv(op, f, np.array(xs), config.quadrature))
    except (BbopsError, ValueError) as e:
        usage_error(str(e))

    for i, value in enumerate(values):
        line = f"{value:.12g}"
        if derivs is not None:
            line += f" {derivs[i]:.12g}"
        print(line)

    params = {
        "op": op.model_dump(mode="json"),
        "fn": f.label,
        "x": xs,
        "values": [float(v) for v in values],
    }
    if derivs is not None:
        params["derivatives"] = [float(d) for d in derivs]
    finish(_document("eval", params, []), outputs)


def run_moments(
    variant: OperatorVariant,
    n: int,
    alpha: float,
    beta: float,
    x: str,
    tol: Optional[float],
    outputs: OutputPaths,
    config_path: Optional[str] = None,
    verbose: Optional[bool] = None,
) -> NoReturn:
    """Closed-form moments j = 0, 1, 2 against direct summation."""
    config = prepare(config_path, verbose)
    tolerance = config.checks.moment_tolerance if tol is None else tol
    try:
        xs = parse_x_list(x)
        _check(validate_points(xs))
        op = _operator(variant, n, alpha, beta)
        reports = [
            operators.moment_report(op, j, point, config.quadrature)
            for point in xs
            for j in (0, 1, 2)
        ]
    except (BbopsError, ValueError) as e:
        usage_error(str(e))

    show_reports_table(reports, title=f"Moments of {op.label}")
    worst = max(r.abs_gap for r in reports)
    params = {"op": op.model_dump(mode="json"), "x": xs, "tolerance": tolerance}
    write_outputs(_document("moments", params, reports), outputs)
    if worst > tolerance:
        console.print(
            f"[bold red]Largest moment gap {worst:.3e} exceeds {tolerance:.1e}[/bold red]"
        )
        sys.exit(EXIT_FAILED_CHECK)
    sys.exit(EXIT_OK)


def run_rate(
    variant: OperatorVariant,
    n_list: Optional[str],
    alpha: float,
    beta: float,
    fn: str,
    grid_points: Optional[int],
    outputs: OutputPaths,
    config_path: Optional[str] = None,
    verbose: Optional[bool] = None,
) -> NoReturn:
    """Sup-norm error table over n and its log-log slope."""
    config = prepare(config_path, verbose)
    grid = _grid(config, grid_points)
    try:
        f = parse_function(fn)
        ns = parse_n_list(n_list or DEFAULT_N_LIST)
        _check(validate_operator_options(variant, ns, alpha, beta))
        family = OperatorConfig(variant=variant, n=max(2, min(ns)), alpha=alpha, beta=beta)
        with create_progress_bar("Computing convergence table...") as progress:
            progress.add_task(f"[cyan]Sweeping {len(ns)} values of n...", total=None)
            rate = experiments.convergence_table(
                family, f, ns, grid, config.quadrature, config.threads
            )
    except (BbopsError, ValueError) as e:
        usage_error(str(e))

    show_rate_table(rate)
    params = {"op": family.model_dump(mode="json"), "fn": f.label, "n": ns, "grid": grid.points}
    finish(_document("rate", params, [rate]), outputs)


def run_modulus(
    fn: str,
    lam: float,
    t_list: Optional[str],
    grid_points: Optional[int],
    outputs: OutputPaths,
    config_path: Optional[str] = None,
    verbose: Optional[bool] = None,
) -> NoReturn:
    """Weighted modulus of smoothness over a t-list and its fitted exponent."""
    config = prepare(config_path, verbose)
    grid = _grid(config, grid_points)
    try:
        f = parse_function(fn)
        ts = parse_t_list(t_list or DEFAULT_T_LIST)
        _check(validate_points([], lam, ts))
        fit = modulus_fit(f, lam, ts, grid)
    except (BbopsError, ValueError) as e:
        usage_error(str(e))

    show_modulus_table(fit)
    params = {"fn": f.label, "lambda": lam, "t": ts, "grid": grid.points}
    finish(_document("modulus", params, [fit]), outputs)


def run_verify(
    suite: str,
    tol: Optional[float],
    grid_points: Optional[int],
    outputs: OutputPaths,
    config_path: Optional[str] = None,
    verbose: Optional[bool] = None,
) -> NoReturn:
    """Run a verification suite and report every check it produces."""
    config = prepare(config_path, verbose)
    try:
        steps = suites.suite_steps(suite)
    except ValueError as e:
        usage_error(str(e))
    if tol is not None and tol < 0.0:
        usage_error(f"--tol must be non-negative, got {tol:g}")
    ctx = suites.SuiteContext.from_config(config, slack=tol)
    if grid_points is not None:
        ctx = ctx.model_copy(update={"grid": _grid(config, grid_points)})

    try:
        with create_progress_bar(f"Suite {suite}", total=len(steps)) as progress:
            task = progress.add_task(f"[cyan]Running suite {suite}...", total=len(steps))
            reports = suites.run_suite(
                suite, ctx, on_step=lambda title: progress.advance(task)
            )
    except BbopsError as e:
        usage_error(str(e))

    show_reports_table(reports, title=f"Suite {suite}")
    document = _document(
        "verify", {"suite": suite, "slack": ctx.slack, "grid": ctx.grid.points}, reports
    )
    gating = [r for r in reports if getattr(r, "gating", True) and hasattr(r, "passed")]
    show_operation_summary(
        "Verification",
        {
            "Suite": suite,
            "Reports": len(reports),
            "Gating checks": len(gating),
            "Failed": len(document.failed_reports()),
        },
    )
    finish(document, outputs)


def run_equiv(
    fn: str,
    lam: float,
    alpha: float,
    beta: float,
    n_list: Optional[str],
    t_list: Optional[str],
    tol: Optional[float],
    grid_points: Optional[int],
    outputs: OutputPaths,
    config_path: Optional[str] = None,
    verbose: Optional[bool] = None,
) -> NoReturn:
    """Compare twice the convergence exponent with the modulus exponent."""
    config = prepare(config_path, verbose)
    grid = _grid(config, grid_points)
    tolerance = config.checks.equivalence_tolerance if tol is None else tol
    try:
        f = parse_function(fn)
        ns = parse_n_list(n_list or DEFAULT_N_LIST)
        ts = parse_t_list(t_list or DEFAULT_T_LIST)
        _check(validate_operator_options(OperatorVariant.GENERALIZED, ns, alpha, beta))
        _check(validate_points([], lam, ts))
        family = OperatorConfig(
            variant=OperatorVariant.GENERALIZED, n=max(2, min(ns)), alpha=alpha, beta=beta
        )
        with create_progress_bar("Comparing exponents...") as progress:
            progress.add_task("[cyan]Computing rate and modulus exponents...", total=None)
            rate = experiments.convergence_table(
                family, f, ns, grid, config.quadrature, config.threads
            )
            record = experiments.equivalence_check(
                f,
                lam,
                alpha,
                beta,
                ns,
                ts,
                grid,
                config.quadrature,
                tolerance=tolerance,
                threads=config.threads,
                rate=rate,
            )
    except (BbopsError, ValueError) as e:
        usage_error(str(e))

    show_rate_table(rate)
    show_reports_table([record], title="Equivalence")
    params = {
        "fn": f.label,
        "lambda": lam,
        "alpha": alpha,
        "beta": beta,
        "n": ns,
        "t": ts,
        "tolerance": tolerance,
        "grid": grid.points,
    }
    finish(_document("equiv", params, [rate, record]), outputs)
