"""Continuous test functions on [0, 1].

A :class:`FunctionSpec` is a frozen, hashable description of f (so it can key
the functional caches) that evaluates vectorized over numpy arrays. The
registry constructors attach what is known analytically: the derivative,
whether f is C^1, and whether f belongs to W_lambda.
"""

import math
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class FunctionKind(str, Enum):
    POLY = "poly"
    HOLDER = "holder"
    ABS_HALF = "abs_half"
    SIN_PI = "sin_pi"
    EXP_X = "exp_x"
    SAMPLED = "sampled"
    # derivative-only kinds
    COS_PI = "cos_pi"
    SIGN_HALF = "sign_half"


class FunctionSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: FunctionKind
    label: str
    coeffs: Tuple[float, ...] = ()
    gamma: Optional[float] = None
    path: Optional[str] = None
    knots: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()
    derivative: Optional["FunctionSpec"] = None
    w_lambda_member: bool = False
    c1: bool = False

    @field_validator("coeffs")
    @classmethod
    def _finite_coeffs(cls, v: Tuple[float, ...]) -> Tuple[float, ...]:
        if not all(math.isfinite(c) for c in v):
            raise ValueError("polynomial coefficients must be finite")
        return v

    @model_validator(mode="after")
    def _check_kind_fields(self) -> "FunctionSpec":
        if self.kind == FunctionKind.POLY and not self.coeffs:
            raise ValueError("poly needs at least one coefficient")
        if self.kind == FunctionKind.HOLDER:
            if self.gamma is None or not 0.0 < self.gamma <= 1.0:
                raise ValueError("holder exponent must lie in (0, 1]")
        if self.kind == FunctionKind.SAMPLED:
            knots = np.asarray(self.knots)
            if len(knots) < 2 or len(knots) != len(self.values):
                raise ValueError("sampled data needs matching x and value columns")
            if knots[0] != 0.0 or knots[-1] != 1.0:
                raise ValueError("sampled x-range must be exactly [0, 1]")
            if np.any(np.diff(knots) <= 0.0):
                raise ValueError("sampled x must be strictly increasing")
        return self

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        kind = self.kind
        if kind == FunctionKind.POLY:
            return P.polyval(x, np.asarray(self.coeffs))
        if kind == FunctionKind.HOLDER:
            return np.abs(x - 0.5) ** self.gamma
        if kind == FunctionKind.ABS_HALF:
            return np.abs(x - 0.5)
        if kind == FunctionKind.SIN_PI:
            return np.sin(np.pi * x)
        if kind == FunctionKind.EXP_X:
            return np.exp(x)
        if kind == FunctionKind.COS_PI:
            return np.pi * np.cos(np.pi * x)
        if kind == FunctionKind.SIGN_HALF:
            return np.sign(x - 0.5)
        return np.interp(x, self.knots, self.values)

    @property
    def polynomial_degree(self) -> Optional[int]:
        if self.kind != FunctionKind.POLY:
            return None
        return len(self.coeffs) - 1

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Interior points where f is not smooth."""
        if self.kind in (
            FunctionKind.HOLDER,
            FunctionKind.ABS_HALF,
            FunctionKind.SIGN_HALF,
        ):
            return (0.5,)
        if self.kind == FunctionKind.SAMPLED:
            return tuple(self.knots[1:-1])
        return ()

    @property
    def singular_points(self) -> Tuple[float, ...]:
        """Breakpoints where f has unbounded derivative (quadrature grades there)."""
        if self.kind == FunctionKind.HOLDER and self.gamma < 1.0:
            return (0.5,)
        return ()

    @property
    def is_constant(self) -> bool:
        return self.kind == FunctionKind.POLY and all(c == 0.0 for c in self.coeffs[1:])


FunctionSpec.model_rebuild()


def _trim(coeffs: Sequence[float]) -> Tuple[float, ...]:
    trimmed = list(float(c) for c in coeffs)
    while len(trimmed) > 1 and trimmed[-1] == 0.0:
        trimmed.pop()
    return tuple(trimmed)


def polynomial(coeffs: Sequence[float], label: Optional[str] = None) -> FunctionSpec:
    """f(x) = c0 + c1 x + c2 x^2 + ..."""
    coeffs = _trim(coeffs) if coeffs else ()
    label = label or "poly:" + ",".join(f"{c:g}" for c in coeffs)
    derivative = None
    if coeffs:
        d = _trim(P.polyder(np.asarray(coeffs))) if len(coeffs) > 1 else (0.0,)
        derivative = FunctionSpec(
            kind=FunctionKind.POLY,
            label="poly:" + ",".join(f"{c:g}" for c in d),
            coeffs=d,
            w_lambda_member=True,
            c1=True,
        )
    return FunctionSpec(
        kind=FunctionKind.POLY,
        label=label,
        coeffs=coeffs,
        derivative=derivative,
        w_lambda_member=True,
        c1=True,
    )


def monomial(j: int) -> FunctionSpec:
    return polynomial([0.0] * j + [1.0], label=f"t^{j}")


def constant(c: float) -> FunctionSpec:
    return polynomial([c], label=f"const:{c:g}")


def _sign_half() -> FunctionSpec:
    return FunctionSpec(kind=FunctionKind.SIGN_HALF, label="sign_half")


def abs_half(label: str = "abs_half") -> FunctionSpec:
    """|x - 1/2|: Lipschitz, in W_lambda, not C^1."""
    return FunctionSpec(
        kind=FunctionKind.ABS_HALF,
        label=label,
        derivative=_sign_half(),
        w_lambda_member=True,
    )


def holder(gamma: float) -> FunctionSpec:
    """|x - 1/2|^gamma; gamma = 1 is the abs_half function."""
    if gamma == 1.0:
        return abs_half(label="holder:1")
    return FunctionSpec(kind=FunctionKind.HOLDER, label=f"holder:{gamma:g}", gamma=gamma)


def sin_pi() -> FunctionSpec:
    return FunctionSpec(
        kind=FunctionKind.SIN_PI,
        label="sin_pi",
        derivative=FunctionSpec(kind=FunctionKind.COS_PI, label="pi*cos_pi"),
        w_lambda_member=True,
        c1=True,
    )


def exp_x() -> FunctionSpec:
    derivative = FunctionSpec(kind=FunctionKind.EXP_X, label="exp_x")
    return FunctionSpec(
        kind=FunctionKind.EXP_X,
        label="exp_x",
        derivative=derivative,
        w_lambda_member=True,
        c1=True,
    )


def sampled(
    knots: Sequence[float], values: Sequence[float], path: Optional[str] = None
) -> FunctionSpec:
    """Continuous piecewise-linear interpolant through (knots, values)."""
    return FunctionSpec(
        kind=FunctionKind.SAMPLED,
        label=f"csv:{path}" if path else "sampled",
        path=path,
        knots=tuple(float(k) for k in knots),
        values=tuple(float(v) for v in values),
    )


def registry() -> Tuple[FunctionSpec, ...]:
    """The builtin functions used by the acceptance sweeps."""
    return (
        polynomial([0.0, 0.0, 1.0]),
        polynomial([0.0, 1.0, -1.0]),
        sin_pi(),
        exp_x(),
        abs_half(),
        holder(0.5),
    )
