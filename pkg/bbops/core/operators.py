"""The four positive linear operators, their derivatives and moment checks.

Every operator is a sum ``sum_k c_k * b_k(x)`` of a coefficient vector
``c`` (length n+1) against a basis: the binomial basis for ``bernstein`` and
``beta-bernstein``, the generalized basis ``Q^{(alpha)}`` for
``bernstein-bezier`` and ``generalized``.
"""

import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from bbops.config_models import GridSpec, OperatorConfig, OperatorVariant, QuadratureSpec
from bbops.core.basis import (
    bezier_basis_matrix,
    binom_basis_matrix,
    q_basis_deriv_matrix,
    q_basis_matrix,
)
from bbops.core.beta_functional import functional_values
from bbops.errors import DomainError, UnsupportedVariantError
from bbops.functions import FunctionSpec, constant, monomial
from bbops.report_models import CheckReport, Lemma3Sums, LimitRecord, LimitRow, MomentReport

logger = logging.getLogger(__name__)

# grid rows evaluated per basis matrix
_ROWS = 256


def grid_points(grid: GridSpec) -> np.ndarray:
    return np.linspace(0.0, 1.0, grid.points)


def interior_points(n: int, grid: GridSpec) -> np.ndarray:
    """Grid on E_n = [1/n, 1 - 1/n]."""
    return np.linspace(1.0 / n, 1.0 - 1.0 / n, grid.points)


def node_values(
    config: OperatorConfig, f: FunctionSpec, quad: Optional[QuadratureSpec] = None
) -> np.ndarray:
    """Coefficient vector c_0..c_n multiplying the basis functions."""
    n = config.n
    variant = config.variant
    if variant in (OperatorVariant.BERNSTEIN, OperatorVariant.BERNSTEIN_BEZIER):
        return np.asarray(f(np.arange(n + 1) / n), dtype=float)
    if variant == OperatorVariant.BETA_BERNSTEIN:
        return np.array(functional_values(n, config.beta, f, quad))
    inner = functional_values(n - 1, config.beta, f, quad)
    return np.concatenate([inner[:n], [float(f(1.0))]])


def _uses_q_basis(config: OperatorConfig) -> bool:
    return config.variant in (
        OperatorVariant.BERNSTEIN_BEZIER,
        OperatorVariant.GENERALIZED,
    )


def basis_matrix(config: OperatorConfig, x) -> np.ndarray:
    if _uses_q_basis(config) and config.alpha != 1.0:
        return q_basis_matrix(config.n, config.alpha, x)
    return binom_basis_matrix(config.n, x)


def _contract(matrix_fn, coeffs: np.ndarray, x) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape[0])
    for start in range(0, xs.shape[0], _ROWS):
        out[start : start + _ROWS] = matrix_fn(xs[start : start + _ROWS]) @ coeffs
    return out


def _like_input(x, values: np.ndarray):
    if np.ndim(x) == 0:
        return float(values[0])
    return values


def apply(
    config: OperatorConfig,
    f: FunctionSpec,
    x,
    quad: Optional[QuadratureSpec] = None,
):
    """Operator value at x (scalar or array)."""
    coeffs = node_values(config, f, quad)
    values = _contract(lambda xs: basis_matrix(config, xs), coeffs, x)
    return _like_input(x, values)


def apply_deriv(
    config: OperatorConfig,
    f: FunctionSpec,
    x,
    quad: Optional[QuadratureSpec] = None,
):
    """First derivative in x of the generalized or Bernstein-Bezier operator."""
    if not _uses_q_basis(config):
        raise UnsupportedVariantError(
            f"derivatives are implemented for generalized and bernstein-bezier, "
            f"not {config.variant.value}"
        )
    coeffs = node_values(config, f, quad)
    values = _contract(
        lambda xs: q_basis_deriv_matrix(config.n, config.alpha, xs), coeffs, x
    )
    return _like_input(x, values)


def derivative_terms(
    config: OperatorConfig,
    f: FunctionSpec,
    x,
    centered: bool = False,
    quad: Optional[QuadratureSpec] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split of the derivative into the k=0 term, the interior sum and the k=n term.

    With ``centered`` every coefficient has f(x) subtracted first; the total
    is unchanged because the derivatives of the basis sum to zero.
    """
    if not _uses_q_basis(config):
        raise UnsupportedVariantError(
            f"derivative terms need a generalized basis, not {config.variant.value}"
        )
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    coeffs = node_values(config, f, quad)
    dq = q_basis_deriv_matrix(config.n, config.alpha, xs)
    c = np.broadcast_to(coeffs, dq.shape)
    if centered:
        c = c - np.asarray(f(xs), dtype=float)[:, None]
    first = c[:, 0] * dq[:, 0]
    middle = np.sum(c[:, 1:-1] * dq[:, 1:-1], axis=1)
    last = c[:, -1] * dq[:, -1]
    return first, middle, last


def moment_closed_form(config: OperatorConfig, j: int, x):
    """Closed-form value of the operator on t^j, j = 0, 1, 2."""
    if j not in (0, 1, 2):
        raise UnsupportedVariantError(f"no closed form for j={j}")
    x = np.asarray(x, dtype=float)
    n = config.n
    phi2 = x * (1.0 - x)
    variant = config.variant
    one = np.ones_like(x)

    if variant == OperatorVariant.BERNSTEIN or (
        variant == OperatorVariant.BERNSTEIN_BEZIER and config.alpha == 1.0
    ):
        values = (one, x, x**2 + phi2 / n)[j]
    elif variant == OperatorVariant.BETA_BERNSTEIN:
        mix = config.beta**2 / (n**2 + 1)
        values = (one, x, x**2 + phi2 / n + mix * (n - 1) / n * phi2)[j]
    elif variant == OperatorVariant.GENERALIZED and config.alpha == 1.0:
        m = n - 1
        xn = x**n
        if j == 0:
            values = one
        elif j == 1:
            values = x + (x - xn) / m
        else:
            mix = config.beta**2 / (m**2 + 1)
            values = (
                n**2 / m**2 * x**2
                + (n / m**2 + mix * n / m) * phi2
                - mix * n / m**2 * x
                + (mix * n / m**2 - (2 * n - 1) / m**2) * xn
            )
    else:
        raise UnsupportedVariantError(
            f"no closed-form moments for {config.label}"
        )
    return float(values) if values.ndim == 0 else values


def _moment_anchor(config: OperatorConfig) -> str:
    if config.variant == OperatorVariant.GENERALIZED:
        return "Lemma 2"
    return "Remark 3"


def moment_report(
    config: OperatorConfig, j: int, x: float, quad: Optional[QuadratureSpec] = None
) -> MomentReport:
    closed = moment_closed_form(config, j, x)
    direct = apply(config, monomial(j), x, quad)
    return MomentReport(
        anchor=_moment_anchor(config),
        config=config,
        x=x,
        j=j,
        closed_form=closed,
        direct_sum=direct,
        abs_gap=abs(closed - direct),
    )


def central_second_moment(
    config: OperatorConfig, x, quad: Optional[QuadratureSpec] = None
):
    """Operator applied to (t - x)^2 at x, by direct summation."""
    c0 = node_values(config, constant(1.0), quad)
    c1 = node_values(config, monomial(1), quad)
    c2 = node_values(config, monomial(2), quad)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape[0])
    for start in range(0, xs.shape[0], _ROWS):
        chunk = xs[start : start + _ROWS]
        coeffs = c2[None, :] - 2.0 * chunk[:, None] * c1[None, :] + chunk[:, None] ** 2 * c0
        out[start : start + _ROWS] = np.sum(basis_matrix(config, chunk) * coeffs, axis=1)
    return _like_input(x, np.maximum(out, 0.0))


def lemma2_check(
    n_values: Iterable[int] = range(2, 51),
    betas: Iterable[float] = (0.0, 0.5, 1.0),
    grid: GridSpec = GridSpec(points=101),
    tolerance: float = 1e-10,
    quad: Optional[QuadratureSpec] = None,
) -> CheckReport:
    """Closed-form moments of the alpha = 1 operator against direct summation."""
    xs = grid_points(grid)
    worst, where, samples = 0.0, {}, 0
    residuals: List[Tuple[float, float]] = []
    for n in n_values:
        for beta in betas:
            config = OperatorConfig(variant=OperatorVariant.GENERALIZED, n=n, beta=beta)
            for j in (0, 1, 2):
                closed = moment_closed_form(config, j, xs)
                direct = apply(config, monomial(j), xs, quad)
                residual = closed - direct
                i = int(np.argmax(np.abs(residual)))
                samples += xs.size
                if abs(residual[i]) > worst:
                    worst = float(abs(residual[i]))
                    where = {"n": n, "beta": beta, "j": j, "x": float(xs[i])}
                    if worst > tolerance:
                        step = max(1, xs.size // 10)
                        residuals = [
                            (float(u), float(r))
                            for u, r in zip(xs[::step], residual[::step])
                        ]
    passed = bool(worst <= tolerance)
    if not passed:
        logger.warning("Moment closed forms disagree: %.3e at %s", worst, where)
    return CheckReport(
        name="lemma2",
        anchor="Lemma 2",
        passed=passed,
        max_violation=worst,
        tolerance=tolerance,
        location=where,
        samples=samples,
        residuals=residuals,
    )


def lemma3_sums(n: int, x: float) -> Lemma3Sums:
    """Bezier-basis sums next to their claimed and corrected closed forms."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    J = bezier_basis_matrix(n, x)
    k = np.arange(1, n)
    m = n - 1
    s1 = float(np.sum(J[1:n])) / m
    s2_direct = float(np.sum(k * J[1:n])) / m**2
    return Lemma3Sums(
        n=n,
        x=x,
        s1=s1,
        s1_closed=n / m * x - x**n / m,
        s2=n * x**2 / (2 * m),
        s2_corrected=((n**2 * x**2 + n * x * (2.0 - x)) / 2.0 - n * x**n) / m**2,
        s2_direct=s2_direct,
    )


def _decreasing(values: Sequence[float], slack: float = 0.05) -> bool:
    return all(b <= a * (1.0 + slack) for a, b in zip(values, values[1:]))


def lemma4_limits(
    alpha: float,
    n_list: Sequence[int],
    grid: GridSpec = GridSpec(points=201),
) -> LimitRecord:
    """Maximal deviation of the two normalized J^alpha sums from x and x^2/2."""
    xs = grid_points(grid)
    rows = []
    for n in n_list:
        J = bezier_basis_matrix(n, xs)[:, 1:n] ** alpha
        k = np.arange(1, n)
        sum1 = J.sum(axis=1) / (n - 1)
        sum2 = (J * k).sum(axis=1) / (n - 1) ** 2
        rows.append(
            LimitRow(
                n=n,
                deviations=[
                    float(np.max(np.abs(sum1 - xs))),
                    float(np.max(np.abs(sum2 - xs**2 / 2.0))),
                ],
            )
        )
    passed = True
    notes = []
    for column in (0, 1):
        devs = [row.deviations[column] for row in rows]
        if not _decreasing(devs):
            passed = False
            notes.append(f"sum {column + 1} deviations are not decreasing")
    if rows and rows[-1].n >= 4096 and max(rows[-1].deviations) >= 0.01:
        passed = False
        notes.append(f"deviation at n={rows[-1].n} is not below 0.01")
    return LimitRecord(
        name="lemma4",
        anchor="Lemma 4",
        alpha=alpha,
        columns=["sum1_minus_x", "sum2_minus_half_x2"],
        rows=rows,
        passed=passed,
        notes=notes,
    )


def lemma5_check(
    n_values: Iterable[int] = range(2, 51),
    alphas: Iterable[float] = (1.0, 1.5, 2.0, 3.0, 5.0),
    grid: GridSpec = GridSpec(points=201),
    slack: float = 1e-12,
) -> CheckReport:
    """0 <= Q^{(alpha)}_{n,k} <= alpha p_{n,k} on the grid."""
    xs = grid_points(grid)
    worst, where, samples = 0.0, {}, 0
    for n in n_values:
        p = binom_basis_matrix(n, xs)
        for alpha in alphas:
            q = q_basis_matrix(n, alpha, xs)
            excess = np.maximum(q - alpha * p, -q)
            i, k = np.unravel_index(int(np.argmax(excess)), excess.shape)
            samples += excess.size
            if excess[i, k] > worst:
                worst = float(excess[i, k])
                where = {"n": n, "k": int(k), "alpha": alpha, "x": float(xs[i])}
    return CheckReport(
        name="lemma5",
        anchor="Lemma 5",
        passed=bool(worst <= slack),
        max_violation=worst,
        tolerance=slack,
        location=where,
        samples=samples,
    )


def korovkin_gaps(
    config_family: OperatorConfig,
    n_list: Sequence[int],
    grid: GridSpec = GridSpec(points=201),
    quad: Optional[QuadratureSpec] = None,
) -> Dict[int, List[float]]:
    """sup_x |L_n(t^j; x) - x^j| per j, one list entry per n."""
    xs = grid_points(grid)
    gaps: Dict[int, List[float]] = {0: [], 1: [], 2: []}
    for n in n_list:
        config = config_family.with_n(n)
        for j in (0, 1, 2):
            values = apply(config, monomial(j), xs, quad)
            gaps[j].append(float(np.max(np.abs(values - xs**j))))
    return gaps


def lemma6_korovkin(
    config_family: OperatorConfig,
    n_list: Sequence[int],
    grid: GridSpec = GridSpec(points=201),
    quad: Optional[QuadratureSpec] = None,
) -> CheckReport:
    """Uniform convergence on 1, t and t^2 as n grows."""
    gaps = korovkin_gaps(config_family, n_list, grid, quad)
    notes = []
    passed = True
    if max(gaps[0]) > 1e-12:
        passed = False
        notes.append("constants are not reproduced")
    for j in (1, 2):
        if not _decreasing(gaps[j]):
            passed = False
            notes.append(f"t^{j} gaps are not decreasing")
    if n_list and max(n_list) >= 4096 and max(gaps[1][-1], gaps[2][-1]) > 0.02:
        passed = False
        notes.append(f"gap at n={n_list[-1]} exceeds 0.02")
    details = {
        f"gap_j{j}_n{n}": gaps[j][i] for j in (0, 1, 2) for i, n in enumerate(n_list)
    }
    return CheckReport(
        name="lemma6",
        anchor="Lemma 6",
        passed=passed,
        max_violation=max(gaps[1][-1], gaps[2][-1]) if n_list else 0.0,
        tolerance=0.02,
        location={"n": float(n_list[-1])} if n_list else {},
        samples=len(n_list) * 3 * grid.points,
        details=details,
        notes=notes,
    )


def lemma7_ratios(
    config: OperatorConfig,
    grid: GridSpec = GridSpec(points=201),
    quad: Optional[QuadratureSpec] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Central-moment ratios to the uniform bound on [0, 1] and the phi^2 bound on E_n.

    Returns (x, ratio_uniform, x_interior, ratio_interior).
    """
    n = config.n
    xs = grid_points(grid)
    uniform = config.alpha / 4.0 * (14.0 + config.beta**2) / (n - 1)
    ratio_a = central_second_moment(config, xs, quad) / uniform
    xe = interior_points(n, grid)
    bound_b = 3.0 * xe * (1.0 - xe) / (n - 1)
    ratio_b = central_second_moment(config, xe, quad) / bound_b
    return xs, ratio_a, xe, ratio_b


def lemma7_check(
    config: OperatorConfig,
    grid: GridSpec = GridSpec(points=201),
    slack: float = 1e-9,
    quad: Optional[QuadratureSpec] = None,
) -> CheckReport:
    xs, ratio_a, xe, ratio_b = lemma7_ratios(config, grid, quad)
    ia, ib = int(np.argmax(ratio_a)), int(np.argmax(ratio_b))
    worst_a, worst_b = float(ratio_a[ia]), float(ratio_b[ib])
    if worst_a >= worst_b:
        location = {"x": float(xs[ia]), "part": 1.0}
    else:
        location = {"x": float(xe[ib]), "part": 2.0}
    location.update(n=config.n, alpha=config.alpha, beta=config.beta)
    return CheckReport(
        name="lemma7",
        anchor="Lemma 7",
        passed=bool(max(worst_a, worst_b) <= 1.0 + slack),
        max_violation=max(worst_a, worst_b),
        tolerance=1.0 + slack,
        location=location,
        samples=xs.size + xe.size,
        details={"max_ratio_uniform": worst_a, "max_ratio_interior": worst_b},
    )


def beta_zero_reduction(
    n: int,
    alpha: float,
    f: FunctionSpec,
    grid: GridSpec = GridSpec(points=201),
    tolerance: float = 1e-12,
) -> CheckReport:
    """The beta = 0 operator against both readings of the Bernstein-Bezier nodes.

    Nodes k/(n-1) must reproduce it; the k/n reading is reported as a distance.
    """
    xs = grid_points(grid)
    generalized = OperatorConfig(variant=OperatorVariant.GENERALIZED, n=n, alpha=alpha)
    reduced = apply(generalized, f, xs)
    nodes = np.minimum(np.arange(n + 1) / (n - 1), 1.0)
    shifted = _contract(
        lambda u: basis_matrix(generalized, u), np.asarray(f(nodes), dtype=float), xs
    )
    bezier = apply(
        OperatorConfig(variant=OperatorVariant.BERNSTEIN_BEZIER, n=n, alpha=alpha), f, xs
    )
    gap_shifted = float(np.max(np.abs(reduced - shifted)))
    gap_bezier = float(np.max(np.abs(reduced - bezier)))
    return CheckReport(
        name="beta_zero_reduction",
        anchor="Beta = 0 reduction",
        passed=bool(gap_shifted <= tolerance),
        max_violation=gap_shifted,
        tolerance=tolerance,
        location={"n": n, "alpha": alpha},
        samples=xs.size,
        details={
            "sup_gap_nodes_k_over_n_minus_1": gap_shifted,
            "sup_gap_nodes_k_over_n": gap_bezier,
        },
        notes=[f"function {f.label}"],
    )


def derivative_consistency_check(
    configs: Sequence[OperatorConfig],
    functions: Sequence[FunctionSpec],
    points: int = 50,
    step: float = 1e-5,
    tolerance: float = 1e-4,
    quad: Optional[QuadratureSpec] = None,
) -> CheckReport:
    """Analytic derivative against central differences at interior points."""
    xs = np.linspace(0.02, 0.98, points)
    worst, where, samples = 0.0, {}, 0
    for config in configs:
        for f in functions:
            analytic = apply_deriv(config, f, xs, quad)
            forward = apply(config, f, xs + step, quad)
            fd = (forward - apply(config, f, xs - step, quad)) / (2.0 * step)
            err = np.abs(analytic - fd) / np.maximum(1.0, np.abs(fd))
            i = int(np.argmax(err))
            samples += xs.size
            if err[i] > worst:
                worst = float(err[i])
                where = {
                    "n": config.n,
                    "alpha": config.alpha,
                    "beta": config.beta,
                    "x": float(xs[i]),
                }
    return CheckReport(
        name="derivative_consistency",
        anchor="Operator derivative",
        passed=bool(worst <= tolerance),
        max_violation=worst,
        tolerance=tolerance,
        location=where,
        samples=samples,
    )


def bernstein_central_check(
    n_list: Iterable[int] = (2, 5, 20, 100),
    grid: GridSpec = GridSpec(points=201),
    tolerance: float = 1e-12,
) -> CheckReport:
    """B_n((t - x)^2; x) = phi^2(x) / n."""
    xs = grid_points(grid)
    worst, where, samples = 0.0, {}, 0
    for n in n_list:
        config = OperatorConfig(variant=OperatorVariant.BERNSTEIN, n=n)
        gap = np.abs(central_second_moment(config, xs) - xs * (1.0 - xs) / n)
        i = int(np.argmax(gap))
        samples += xs.size
        if gap[i] > worst:
            worst, where = float(gap[i]), {"n": n, "x": float(xs[i])}
    return CheckReport(
        name="bernstein_central",
        anchor="Bernstein central moment",
        passed=bool(worst <= tolerance),
        max_violation=worst,
        tolerance=tolerance,
        location=where,
        samples=samples,
    )


def lemma3_check(
    n_values: Iterable[int] = range(2, 201),
    grid: GridSpec = GridSpec(points=101),
    tolerance: float = 1e-10,
) -> CheckReport:
    """First sum against its closed form and the weighted sum against the corrected identity.

    The printed weighted-sum value is reported as a detail, not gated.
    """
    xs = grid_points(grid)
    worst, where, samples = 0.0, {}, 0
    for n in n_values:
        J = bezier_basis_matrix(n, xs)[:, 1:n]
        k = np.arange(1, n)
        m = n - 1
        s1 = J.sum(axis=1) / m
        s2 = (J * k).sum(axis=1) / m**2
        s1_closed = n / m * xs - xs**n / m
        s2_corrected = ((n**2 * xs**2 + n * xs * (2.0 - xs)) / 2.0 - n * xs**n) / m**2
        gap = np.maximum(np.abs(s1 - s1_closed), np.abs(s2 - s2_corrected))
        i = int(np.argmax(gap))
        samples += xs.size
        if gap[i] > worst:
            worst, where = float(gap[i]), {"n": n, "x": float(xs[i])}
    printed = lemma3_sums(2, 0.5)
    return CheckReport(
        name="lemma3",
        anchor="Lemma 3",
        passed=bool(worst <= tolerance),
        max_violation=worst,
        tolerance=tolerance,
        location=where,
        samples=samples,
        details={
            "printed_weighted_sum_n2_x0.5": printed.s2,
            "direct_weighted_sum_n2_x0.5": printed.s2_direct,
        },
        notes=["the printed weighted-sum identity is not exact; the corrected one is gated"],
    )


