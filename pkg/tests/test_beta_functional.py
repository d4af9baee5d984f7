import math

import numpy as np
import pytest

from bbops.config_models import QuadratureSpec, QuadratureStrategy
from bbops.core.beta_functional import (
    beta_expectation,
    beta_moment,
    f_functional,
    f_functional_moment,
    functional_values,
    lemma1_check,
    log_beta,
)
from bbops.errors import DomainError
from bbops.functions import abs_half, constant, holder, monomial, polynomial, sin_pi


@pytest.mark.parametrize(
    "p, q, expected",
    [
        (1.0, 1.0, 0.0),
        (2.0, 3.0, -2.484906649788),
        (0.5, 0.5, 1.144729885849),
    ],
)
def test_log_beta(p, q, expected):
    assert log_beta(p, q) == pytest.approx(expected, abs=1e-11)


def test_log_beta_rejects_nonpositive_arguments():
    with pytest.raises(DomainError):
        log_beta(0.0, 1.0)


@pytest.mark.parametrize(
    "a, b, j, expected",
    [
        (4.0, 4.0, 1, 0.5),
        (8.0, 8.0, 2, 9.0 / 34.0),
        (2.0, 3.0, 2, 0.2),
        (3.0, 0.0, 2, 1.0),
    ],
)
def test_beta_moment(a, b, j, expected):
    assert beta_moment(a, b, j) == pytest.approx(expected, rel=1e-14)


def test_beta_expectation_matches_moments():
    quad = QuadratureSpec()
    assert beta_expectation(8.0, 8.0, monomial(2), quad) == pytest.approx(9.0 / 34.0, abs=1e-10)
    assert beta_expectation(2.0, 3.0, sin_pi(), quad) == pytest.approx(
        _beta23_sin_expectation(), abs=1e-9
    )


@pytest.mark.parametrize("j", [1, 3, 6])
@pytest.mark.parametrize(
    "a, b", [(2.0, 3.0), (50.0, 950.0), (5000.0, 5000.0), (9999.0, 1.0), (1.0, 9999.0)]
)
def test_beta_expectation_matches_moments_for_skewed_shapes(a, b, j):
    value = beta_expectation(a, b, monomial(j), QuadratureSpec())
    assert value == pytest.approx(beta_moment(a, b, j), abs=1e-10)


def _beta23_sin_expectation():
    # dense midpoint reference for the smooth integrand
    t = (np.arange(200_000) + 0.5) / 200_000
    density = 12.0 * t * (1.0 - t) ** 2
    return float(np.mean(density * np.sin(np.pi * t)))


@pytest.mark.parametrize(
    "n, k, beta, f, expected",
    [
        (5, 2, 0.7, constant(1.0), 1.0),
        (5, 2, 0.3, monomial(1), 0.5),
        (5, 2, 1.0, monomial(2), 9.0 / 34.0),
        (5, 4, 0.9, monomial(2), 1.0),
    ],
)
def test_f_functional(n, k, beta, f, expected):
    assert f_functional(n, k, beta, f) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "n, k, beta, j, expected",
    [
        (9, 3, 0.5, 0, 1.0),
        (9, 3, 0.5, 1, 0.375),
        (5, 4, 0.9, 2, 1.0),
    ],
)
def test_f_functional_moment(n, k, beta, j, expected):
    assert f_functional_moment(n, k, beta, j) == pytest.approx(expected, abs=1e-14)


def test_f_functional_rejects_out_of_range_index():
    with pytest.raises(DomainError):
        f_functional(5, 0, 0.5, monomial(1))
    with pytest.raises(DomainError):
        f_functional(5, 5, 0.5, monomial(1))


def test_functional_values_include_endpoint_samples():
    f = polynomial([2.0, -1.0, 3.0])
    values = functional_values(6, 0.4, f)
    assert values[0] == pytest.approx(2.0)
    assert values[-1] == pytest.approx(4.0)
    assert not values.flags.writeable


def test_functional_values_beta_zero_samples_the_nodes():
    values = functional_values(8, 0.0, sin_pi())
    assert np.allclose(values, np.sin(np.pi * np.arange(9) / 8), atol=1e-15)


def test_exact_polynomial_path_expands_against_beta_moments():
    f = polynomial([0.1, -0.3, 0.0, 1.0])
    values = functional_values(30, 0.6, f)
    for k in (1, 10, 29):
        expected = 0.1 - 0.3 * (k / 30) + beta_cubic(30, k, 0.6)
        assert values[k] == pytest.approx(expected, abs=1e-12)


def beta_cubic(m, k, beta):
    a, b = m * k, m * (m - k)
    anchor = (1.0 - beta) * k / m
    return sum(
        math.comb(3, r) * beta**r * anchor ** (3 - r) * beta_moment(a, b, r) for r in range(4)
    )


def test_windowed_and_full_composite_agree_on_a_kink():
    windowed = functional_values(40, 0.5, abs_half(), QuadratureSpec())
    full = functional_values(
        40, 0.5, abs_half(), QuadratureSpec(strategy=QuadratureStrategy.FULL_COMPOSITE)
    )
    assert np.allclose(windowed, full, atol=1e-7)


def test_holder_functional_is_finite_and_bounded():
    values = functional_values(64, 1.0, holder(0.5))
    assert np.all(np.isfinite(values))
    assert np.all(values >= 0.0)
    assert np.all(values <= math.sqrt(0.5) + 1e-12)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_functional_is_positive_and_monotone(beta):
    # 0 <= |t - 1/2| <= |t - 1/2|^(1/2) <= 1/sqrt(2) on [0, 1]
    low = functional_values(48, beta, abs_half())
    high = functional_values(48, beta, holder(0.5))
    assert np.all(low >= -1e-12)
    assert np.all(low <= high + 1e-8)
    assert np.all(high <= functional_values(48, beta, constant(math.sqrt(0.5))) + 1e-8)
    assert np.all(functional_values(48, beta, sin_pi()) >= -1e-12)


def test_exact_poly_strategy_rejects_non_polynomials():
    with pytest.raises(DomainError):
        functional_values(10, 0.5, sin_pi(), QuadratureSpec(strategy=QuadratureStrategy.EXACT_POLY))


def test_lemma1_check_passes():
    report = lemma1_check(n_max=20)
    assert report.passed
    assert report.anchor == "Lemma 1"
    assert report.max_violation <= 1e-10
    assert report.samples == 3 * 4 * sum(range(1, 20))
