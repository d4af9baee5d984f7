import math

import numpy as np
import pytest

from bbops.config_models import GridSpec
from bbops.core.smoothness import (
    ModulusQuery,
    classical_modulus,
    dt_modulus,
    loglog_fit,
    modulus_exponent,
    modulus_fit,
    phi,
    sup_norm,
    weighted_sup_norm,
)
from bbops.errors import DegenerateFitError, DomainError
from bbops.functions import abs_half, constant, holder, monomial, polynomial, sin_pi

T_HALVING = [2.0**-p for p in range(3, 13)]


@pytest.mark.parametrize(
    "x, expected",
    [(0.0, 0.0), (0.5, 0.5), (0.25, math.sqrt(3.0) / 4.0)],
)
def test_phi(x, expected):
    assert phi(x) == pytest.approx(expected, abs=1e-12)


def test_phi_rejects_points_outside_unit_interval():
    with pytest.raises(DomainError):
        phi(-0.1)


@pytest.mark.parametrize(
    "f, expected",
    [
        (abs_half(), 0.5),
        (polynomial([0.0, 1.0, -1.0]), 0.25),
        (sin_pi(), 1.0),
    ],
)
def test_sup_norm(f, expected):
    assert sup_norm(f) == pytest.approx(expected, abs=1e-10)


def test_weighted_sup_norm_of_constant_is_sup_of_weight():
    assert weighted_sup_norm(constant(2.0), 1.0) == pytest.approx(1.0, abs=1e-10)
    assert weighted_sup_norm(constant(2.0), 0.0) == pytest.approx(2.0)


@pytest.mark.parametrize(
    "f, delta, expected, tol",
    [
        (monomial(1), 0.3, 0.3, 1e-12),
        (constant(1.5), 0.2, 0.0, 0.0),
        (holder(0.5), 0.01, 0.1, 2e-3),
    ],
)
def test_classical_modulus(f, delta, expected, tol):
    assert classical_modulus(f, delta) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize(
    "f, lam, t, expected, tol",
    [
        (constant(3.0), 0.5, 0.1, 0.0, 0.0),
        (monomial(1), 0.0, 0.1, 0.1, 1e-12),
        (monomial(1), 1.0, 0.2, 0.1, 1e-4),
        (monomial(2), 0.0, 0.25, 2 * 0.25 - 0.25**2, 1e-6),
        (abs_half(), 1.0, 0.1, 0.05, 1e-3),
    ],
)
def test_dt_modulus(f, lam, t, expected, tol):
    assert dt_modulus(ModulusQuery(f=f, lam=lam, t=t)) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize(
    "f, lam, t, expected",
    [
        (abs_half(), 0.5, 1.0, 0.5),
        (sin_pi(), 0.5, 1.0, 1.0),
        (holder(0.5), 0.0, 1e-3, math.sqrt(1e-3)),
        (holder(0.5), 0.0, 0.1, math.sqrt(0.1)),
        (holder(0.5), 0.0, 0.4, math.sqrt(0.4)),
    ],
)
def test_dt_modulus_reaches_the_feasibility_boundary(f, lam, t, expected):
    assert dt_modulus(ModulusQuery(f=f, lam=lam, t=t)) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize(
    "f, lam", [(abs_half(), 0.5), (sin_pi(), 0.5), (holder(0.5), 0.0), (holder(0.5), 1.0)]
)
def test_dt_modulus_is_nondecreasing_in_t(f, lam):
    ts = np.geomspace(1e-4, 1.0, 30)
    omegas = np.array([dt_modulus(ModulusQuery(f=f, lam=lam, t=t)) for t in ts])
    assert np.all(np.diff(omegas) >= -1e-12)


@pytest.mark.parametrize("t", [1e-3, 0.1])
@pytest.mark.parametrize("f", [abs_half(), holder(0.5), sin_pi()])
def test_dt_modulus_is_nonincreasing_in_lambda(f, t):
    omegas = np.array(
        [dt_modulus(ModulusQuery(f=f, lam=lam, t=t)) for lam in (0.0, 0.25, 0.5, 0.75, 1.0)]
    )
    assert np.all(np.diff(omegas) <= 1e-6)


@pytest.mark.parametrize("t", [1e-3, 0.05, 0.25])
@pytest.mark.parametrize("f", [abs_half(), holder(0.5), sin_pi()])
def test_classical_modulus_is_subadditive(f, t):
    assert classical_modulus(f, 2.0 * t) <= 2.0 * classical_modulus(f, t) + 1e-9


def test_modulus_query_accepts_lambda_alias():
    q = ModulusQuery.model_validate({"f": monomial(1), "lambda": 0.5, "t": 0.1})
    assert q.lam == 0.5


def test_loglog_fit_recovers_power_law():
    xs = [2.0**p for p in range(4, 12)]
    slope, intercept, r2 = loglog_fit(xs, [3.0 * x**-0.5 for x in xs])
    assert slope == pytest.approx(-0.5)
    assert intercept == pytest.approx(math.log(3.0))
    assert r2 == pytest.approx(1.0)


def test_loglog_fit_needs_two_positive_samples():
    with pytest.raises(DegenerateFitError):
        loglog_fit([1.0, 2.0, 3.0], [0.0, 0.0, 1.0])


@pytest.mark.parametrize(
    "f, expected",
    [
        (abs_half(), 1.0),
        (holder(0.5), 0.5),
        (polynomial([0.0, 0.0, 1.0]), 1.0),
    ],
)
def test_modulus_exponent_classical(f, expected):
    gamma_hat, r2 = modulus_exponent(f, 0.0, T_HALVING, GridSpec())
    assert gamma_hat == pytest.approx(expected, abs=0.05)
    assert r2 > 0.9


def test_modulus_fit_of_constant_has_no_exponent():
    fit = modulus_fit(constant(1.0), 0.0, T_HALVING, GridSpec(points=101))
    assert fit.gamma_hat is None
    assert all(row.omega == 0.0 for row in fit.rows)
    with pytest.raises(DegenerateFitError):
        modulus_exponent(constant(1.0), 0.0, T_HALVING, GridSpec(points=101))


def test_modulus_fit_rows_are_ordered_by_decreasing_t():
    fit = modulus_fit(sin_pi(), 0.5, [0.01, 0.1, 0.05], GridSpec(points=201))
    assert [row.t for row in fit.rows] == [0.1, 0.05, 0.01]
    omegas = np.array([row.omega for row in fit.rows])
    assert np.all(np.diff(omegas) <= 0.0)
