import numpy as np
import pytest

from bbops.config_models import GridSpec, OperatorConfig, OperatorVariant
from bbops.core.experiments import (
    beta_bernstein_central_report,
    convergence_table,
    derivative_points,
    equivalence_check,
    lemma7_sweep,
    lemma8_suite,
    lemma9_suite,
    sup_error,
    theorem2_ratio_scan,
    theorem3_check,
    theorem3_sweep,
)
from bbops.errors import NotC1Error, NotInWLambdaError
from bbops.functions import abs_half, constant, holder, polynomial, sin_pi
from bbops.report_models import BoundLemma

SWEEP_GRID = GridSpec(points=201)
X_SQUARED = polynomial([0.0, 0.0, 1.0])


def generalized(n=16, alpha=1.0, beta=0.0):
    return OperatorConfig(variant=OperatorVariant.GENERALIZED, n=n, alpha=alpha, beta=beta)


def test_sup_error_of_constant_vanishes():
    assert sup_error(generalized(n=64, alpha=2.0, beta=0.5), constant(2.0), SWEEP_GRID) <= 1e-12


def test_convergence_table_of_smooth_function():
    rate = convergence_table(generalized(), X_SQUARED, [16, 32, 64, 128, 256, 512, 1024])
    assert [row.n for row in rate.rows] == [16, 32, 64, 128, 256, 512, 1024]
    assert rate.fit_start == 3
    assert -1.15 <= rate.slope <= -0.85


def test_convergence_table_of_constant_is_exact():
    rate = convergence_table(generalized(), constant(1.0), [16, 32, 64, 128, 256], SWEEP_GRID)
    assert all(row.sup_error <= 1e-12 for row in rate.rows)


def test_convergence_table_without_transient_rows_fits_everything():
    rate = convergence_table(generalized(), X_SQUARED, [16, 64, 256], SWEEP_GRID)
    assert rate.fit_start == 0


def test_theorem3_check_passes_for_smooth_function():
    report = theorem3_check(generalized(n=16), X_SQUARED)
    assert report.lemma == BoundLemma.T3
    assert report.passed
    assert report.max_ratio < 1.0


def test_theorem3_rejects_functions_without_derivative():
    with pytest.raises(NotC1Error):
        theorem3_check(generalized(), abs_half())


def test_theorem3_sweep_small():
    report = theorem3_sweep(
        [X_SQUARED, sin_pi()], [4, 16, 64], [1.0, 2.0], [0.0, 1.0], grid=SWEEP_GRID
    )
    assert report.passed
    assert report.samples == 2 * 3 * 2 * 2


def test_theorem2_ratio_scan_is_bounded():
    family = generalized(beta=0.5)
    report = theorem2_ratio_scan(family, abs_half(), 1.0, [16, 32, 64, 128, 256], SWEEP_GRID)
    assert report.lemma == BoundLemma.T2_RATIO
    assert report.passed
    assert [n for n, _ in report.curve] == [16.0, 32.0, 64.0, 128.0, 256.0]
    assert all(np.isfinite(r) and r > 0.0 for _, r in report.curve)


def test_derivative_points_cover_the_interior_interval():
    xs = derivative_points(8, GridSpec(points=11))
    assert xs[0] == pytest.approx(1.0 / 16.0)
    assert xs[1] == pytest.approx(1.0 / 8.0)
    assert xs[-1] == pytest.approx(1.0 - 1.0 / 16.0)
    assert xs.size == 13


def test_lemma8_suite_example():
    bound, terms = lemma8_suite(
        [abs_half()], [0.5], [32], alphas=[2.0], betas=[0.0, 0.5], grid=SWEEP_GRID
    )
    assert bound.lemma == BoundLemma.L8 and bound.passed
    assert terms.lemma == BoundLemma.L8_TERMS and not terms.gating


def test_lemma8_suite_constant_has_zero_derivative():
    bound, _ = lemma8_suite([constant(1.0)], [0.0, 1.0], [8, 16], grid=SWEEP_GRID)
    assert bound.max_ratio <= 1e-9
    assert bound.passed


def test_lemma9_suite_example():
    bound, terms = lemma9_suite([X_SQUARED], [1.0], [64], alphas=[1.0], grid=SWEEP_GRID)
    assert bound.lemma == BoundLemma.L9 and bound.passed
    assert not terms.gating


def test_lemma9_suite_rejects_functions_outside_w_lambda():
    with pytest.raises(NotInWLambdaError):
        lemma9_suite([holder(0.5)], [1.0], [16])


def test_lemma7_sweep_small():
    uniform, interior = lemma7_sweep(range(2, 12), grid=GridSpec(points=51))
    assert uniform.lemma == BoundLemma.L7A and uniform.passed
    assert interior.lemma == BoundLemma.L7B and interior.passed
    assert interior.anchor == "Lemma 7(2)"


def test_beta_bernstein_central_report_is_informational():
    report = beta_bernstein_central_report(range(3, 12), grid=GridSpec(points=51))
    assert report.lemma == BoundLemma.E2
    assert not report.gating


@pytest.mark.slow
@pytest.mark.parametrize(
    "f, expected_slope",
    [(abs_half(), -0.5), (holder(0.5), -0.25)],
)
def test_rate_reproduction(f, expected_slope):
    family = generalized(beta=0.5)
    rate = convergence_table(family, f, [2**p for p in range(4, 14)])
    assert rate.slope == pytest.approx(expected_slope, abs=0.1)


@pytest.mark.slow
@pytest.mark.parametrize("f", [abs_half(), holder(0.5)])
def test_equivalence_of_rate_and_modulus_exponents(f):
    record = equivalence_check(
        f,
        1.0,
        1.0,
        0.5,
        [2**p for p in range(4, 14)],
        [2.0**-p for p in range(3, 13)],
    )
    assert record.passed, (record.rate_exp, record.modulus_exp)
    assert record.gap <= 0.15
