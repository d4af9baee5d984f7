import numpy as np
import pytest

from bbops.config_models import GridSpec, OperatorConfig, OperatorVariant
from bbops.core.operators import (
    apply,
    apply_deriv,
    bernstein_central_check,
    beta_zero_reduction,
    central_second_moment,
    derivative_consistency_check,
    derivative_terms,
    korovkin_gaps,
    lemma2_check,
    lemma3_check,
    lemma3_sums,
    lemma4_limits,
    lemma5_check,
    lemma6_korovkin,
    lemma7_check,
    moment_closed_form,
    moment_report,
    node_values,
)
from bbops.errors import UnsupportedVariantError
from bbops.functions import abs_half, constant, monomial, polynomial, sin_pi

GENERALIZED = OperatorVariant.GENERALIZED
SMALL_GRID = GridSpec(points=51)


def op(variant=GENERALIZED, n=10, alpha=1.0, beta=0.0):
    return OperatorConfig(variant=variant, n=n, alpha=alpha, beta=beta)


def test_irrelevant_parameters_are_normalized():
    assert op(OperatorVariant.BERNSTEIN, alpha=2.0, beta=0.5) == op(OperatorVariant.BERNSTEIN)
    assert op(OperatorVariant.BERNSTEIN_BEZIER, alpha=2.0, beta=0.5).beta == 0.0


@pytest.mark.parametrize(
    "config, f, x, expected",
    [
        (op(n=3, beta=0.7), monomial(1), 0.5, 0.6875),
        (op(n=3, beta=0.0), monomial(1), 0.5, 0.6875),
        (op(OperatorVariant.BERNSTEIN, n=10), monomial(1), 0.37, 0.37),
        (op(n=7, alpha=2.0, beta=0.5), sin_pi(), 0.0, 0.0),
        (op(n=7, alpha=2.0, beta=0.5), polynomial([2.0, 1.0]), 0.0, 2.0),
        (op(n=7, alpha=3.0, beta=1.0), polynomial([2.0, 1.0]), 1.0, 3.0),
    ],
)
def test_apply_examples(config, f, x, expected):
    assert apply(config, f, x) == pytest.approx(expected, abs=1e-12)


def test_apply_reproduces_constants_for_every_variant():
    xs = np.linspace(0.0, 1.0, 21)
    for variant in OperatorVariant:
        config = op(variant, n=12, alpha=1.0, beta=0.0)
        if variant in (OperatorVariant.GENERALIZED, OperatorVariant.BERNSTEIN_BEZIER):
            config = op(variant, n=12, alpha=2.5)
        assert np.allclose(apply(config, constant(3.0), xs), 3.0, atol=1e-12)


def test_apply_is_positive():
    xs = np.linspace(0.0, 1.0, 41)
    values = apply(op(n=20, alpha=2.0, beta=0.5), abs_half(), xs)
    assert np.all(values >= 0.0)


def test_generalized_nodes_end_with_point_mass_at_one():
    c = node_values(op(n=5, beta=0.9), monomial(2))
    assert c[0] == 0.0
    assert c[-2] == pytest.approx(1.0)
    assert c[-1] == pytest.approx(1.0)


@pytest.mark.parametrize(
    "config, f, x, expected",
    [
        (op(n=3), monomial(1), 0.5, 1.125),
        (op(OperatorVariant.BERNSTEIN_BEZIER, n=2), monomial(1), 0.5, 1.0),
        (op(n=9, alpha=2.0, beta=0.5), constant(4.0), 0.3, 0.0),
    ],
)
def test_apply_deriv_examples(config, f, x, expected):
    assert apply_deriv(config, f, x) == pytest.approx(expected, abs=1e-12)


def test_apply_deriv_rejects_binomial_variants():
    with pytest.raises(UnsupportedVariantError):
        apply_deriv(op(OperatorVariant.BERNSTEIN), monomial(1), 0.5)


def test_derivative_terms_sum_to_derivative():
    config = op(n=16, alpha=2.0, beta=0.5)
    xs = np.linspace(0.05, 0.95, 7)
    total = apply_deriv(config, sin_pi(), xs)
    for centered in (False, True):
        first, middle, last = derivative_terms(config, sin_pi(), xs, centered=centered)
        assert np.allclose(first + middle + last, total, atol=1e-10)


@pytest.mark.parametrize(
    "config, j, x, expected",
    [
        (op(n=17, beta=0.5), 0, 0.42, 1.0),
        (op(n=3, beta=0.5), 1, 0.5, 0.6875),
        (op(OperatorVariant.BERNSTEIN, n=4), 2, 0.5, 0.3125),
    ],
)
def test_moment_closed_form(config, j, x, expected):
    assert moment_closed_form(config, j, x) == pytest.approx(expected, abs=1e-14)


def test_moment_closed_form_needs_alpha_one_for_generalized():
    with pytest.raises(UnsupportedVariantError):
        moment_closed_form(op(alpha=2.0), 1, 0.5)


@pytest.mark.parametrize(
    "config",
    [
        op(n=6, beta=1.0),
        op(OperatorVariant.BETA_BERNSTEIN, n=8, beta=0.7),
        op(OperatorVariant.BERNSTEIN_BEZIER, n=8),
    ],
)
def test_moment_report_closed_form_matches_summation(config):
    for j in (0, 1, 2):
        report = moment_report(config, j, 0.3)
        assert report.abs_gap <= 1e-12


def test_central_second_moment_examples():
    assert central_second_moment(op(OperatorVariant.BERNSTEIN, n=20), 0.5) == pytest.approx(0.0125)
    assert central_second_moment(op(n=9, alpha=2.0, beta=0.5), 0.0) == pytest.approx(0.0, abs=1e-15)


def test_central_second_moment_agrees_with_closed_forms():
    config = op(n=10)
    x = 0.5
    expected = (
        moment_closed_form(config, 2, x)
        - 2 * x * moment_closed_form(config, 1, x)
        + x**2
    )
    assert central_second_moment(config, x) == pytest.approx(expected, abs=1e-10)


def test_lemma2_check_passes():
    report = lemma2_check(n_values=range(2, 21), grid=GridSpec(points=41))
    assert report.passed, report.location
    assert report.residuals == []


def test_lemma3_sums_flag_the_printed_identity():
    small = lemma3_sums(2, 0.5)
    assert small.s1 == pytest.approx(0.75)
    assert small.s1_closed == pytest.approx(0.75)
    assert small.s2 == pytest.approx(0.25)
    assert small.s2_direct == pytest.approx(0.75)
    assert small.s2_corrected == pytest.approx(0.75)

    large = lemma3_sums(200, 0.5)
    assert large.s2_direct == pytest.approx(large.s2_corrected, abs=1e-10)
    assert large.s2_direct / large.s2 == pytest.approx(1.0, abs=0.025)


def test_lemma3_sums_vanish_at_zero():
    sums = lemma3_sums(9, 0.0)
    assert (sums.s1, sums.s2, sums.s2_direct) == (0.0, 0.0, 0.0)


def test_lemma3_check_gates_corrected_identity():
    report = lemma3_check(n_values=range(2, 60), grid=GridSpec(points=41))
    assert report.passed
    assert report.details["printed_weighted_sum_n2_x0.5"] == pytest.approx(0.25)
    assert report.details["direct_weighted_sum_n2_x0.5"] == pytest.approx(0.75)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_lemma4_limits_shrink(alpha):
    record = lemma4_limits(alpha, [16, 64, 256, 1024, 4096], GridSpec(points=101))
    assert record.passed, record.notes
    assert max(record.rows[-1].deviations) < 0.01


def test_lemma5_check_passes():
    report = lemma5_check(n_values=range(2, 21), grid=SMALL_GRID)
    assert report.passed


def test_korovkin_gaps_and_check():
    family = op(alpha=2.0, beta=0.5)
    ns = [16, 32, 64, 128]
    gaps = korovkin_gaps(family, ns, SMALL_GRID)
    assert max(gaps[0]) <= 1e-12
    report = lemma6_korovkin(family, ns, SMALL_GRID)
    assert report.passed, report.notes


def test_korovkin_first_moment_gap_bound():
    gaps = korovkin_gaps(op(beta=0.5), [1024], SMALL_GRID)
    assert gaps[1][0] <= 2.0 / 1023


@pytest.mark.parametrize(
    "config",
    [op(n=10), op(n=2, alpha=3.0, beta=1.0), op(n=37, alpha=2.0, beta=0.5)],
)
def test_lemma7_check_passes(config):
    report = lemma7_check(config, SMALL_GRID)
    assert report.passed, report.details


def test_beta_zero_reduction_uses_shifted_nodes():
    report = beta_zero_reduction(10, 2.0, sin_pi(), SMALL_GRID)
    assert report.passed
    assert report.details["sup_gap_nodes_k_over_n"] > 1e-6


def test_bernstein_central_check_passes():
    assert bernstein_central_check(grid=SMALL_GRID).passed


def test_derivative_consistency_check_passes():
    configs = [op(n=8, alpha=2.0, beta=0.5), op(OperatorVariant.BERNSTEIN_BEZIER, n=12, alpha=3.0)]
    functions = [polynomial([0.0, 0.0, 1.0]), sin_pi()]
    report = derivative_consistency_check(configs, functions, points=20)
    assert report.passed, report.location
    assert report.samples == 2 * 2 * 20
