import numpy as np
import pytest
from pydantic import ValidationError

from bbops.functions import (
    FunctionKind,
    abs_half,
    constant,
    exp_x,
    holder,
    monomial,
    polynomial,
    registry,
    sampled,
    sin_pi,
)


def test_polynomial_evaluates_and_differentiates():
    f = polynomial([1.0, -2.0, 3.0])
    xs = np.array([0.0, 0.5, 1.0])
    assert np.allclose(f(xs), 1.0 - 2.0 * xs + 3.0 * xs**2)
    assert np.allclose(f.derivative(xs), -2.0 + 6.0 * xs)
    assert f.polynomial_degree == 2
    assert f.label == "poly:1,-2,3"


def test_polynomial_trims_trailing_zeros():
    assert polynomial([0.0, 1.0, 0.0, 0.0]).polynomial_degree == 1


def test_polynomial_rejects_nonfinite_coefficients():
    with pytest.raises(ValidationError):
        polynomial([0.0, float("nan")])


def test_constant_and_monomial():
    assert constant(2.5).is_constant
    assert not monomial(1).is_constant
    assert monomial(3)(0.5) == pytest.approx(0.125)
    assert monomial(3).label == "t^3"


def test_holder_family():
    f = holder(0.5)
    assert f(0.25) == pytest.approx(0.5)
    assert f.singular_points == (0.5,)
    assert not f.c1
    assert holder(1.0).kind == FunctionKind.ABS_HALF
    with pytest.raises(ValidationError):
        holder(1.5)


def test_registry_tags():
    assert abs_half().w_lambda_member and not abs_half().c1
    assert sin_pi().c1 and sin_pi().derivative(0.0) == pytest.approx(np.pi)
    assert exp_x().derivative(1.0) == pytest.approx(np.e)
    labels = [f.label for f in registry()]
    assert labels == ["poly:0,0,1", "poly:0,1,-1", "sin_pi", "exp_x", "abs_half", "holder:0.5"]


def test_function_specs_are_hashable_and_equal_by_value():
    assert hash(polynomial([0.0, 1.0])) == hash(polynomial([0.0, 1.0]))
    assert {sin_pi(), sin_pi()} == {sin_pi()}


def test_sampled_interpolates_linearly():
    f = sampled([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
    assert f(0.25) == pytest.approx(0.5)
    assert f.breakpoints == (0.5,)


@pytest.mark.parametrize(
    "knots, values",
    [
        ([0.1, 1.0], [0.0, 1.0]),
        ([0.0, 0.9], [0.0, 1.0]),
        ([0.0, 0.6, 0.6, 1.0], [0.0, 1.0, 2.0, 0.0]),
        ([0.0, 1.0], [0.0]),
    ],
)
def test_sampled_rejects_bad_data(knots, values):
    with pytest.raises(ValidationError):
        sampled(knots, values)
