"""The phi weight, sup-norms and moduli of smoothness on [0, 1]."""

import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize, stats

from bbops.config_models import GridSpec
from bbops.errors import DegenerateFitError, DomainError
from bbops.functions import FunctionSpec
from bbops.report_models import ModulusFit, ModulusRow

logger = logging.getLogger(__name__)

# step sizes tried at each point, as fractions of the largest feasible step
_H_FRACTIONS = np.geomspace(1.0 / 1024.0, 1.0, 64)


class ModulusQuery(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    f: FunctionSpec
    lam: float = Field(default=0.0, ge=0.0, le=1.0, alias="lambda")
    t: float = Field(gt=0.0, le=1.0)
    grid: GridSpec = Field(default_factory=GridSpec)


def phi(x):
    """sqrt(x (1 - x))."""
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"phi is defined on [0, 1], got {x}")
    value = np.sqrt(arr * (1.0 - arr))
    return float(value) if value.ndim == 0 else value


def _phi_power(x: np.ndarray, lam: float) -> np.ndarray:
    if lam == 0.0:
        return np.ones_like(x)
    return np.sqrt(np.clip(x * (1.0 - x), 0.0, None)) ** lam


def _refined_max(
    g: Callable[[np.ndarray], np.ndarray], xs: np.ndarray, refine: int
) -> Tuple[float, float]:
    """Max of g on the grid, polished by bounded 1-D searches around the top three."""
    values = np.asarray(g(xs), dtype=float)
    best_i = int(np.argmax(values))
    best, where = float(values[best_i]), float(xs[best_i])
    if refine <= 0 or xs.size < 3:
        return best, where
    for i in np.argsort(values)[::-1][:3]:
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
        result = optimize.minimize_scalar(
            lambda u: -float(g(np.array([u]))[0]),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12, "maxiter": refine},
        )
        if -result.fun > best:
            best, where = float(-result.fun), float(result.x)
    return best, where


def sup_norm(f: Callable, grid: Optional[GridSpec] = None) -> float:
    """max |f| on [0, 1] (a lower bound that is exact on unimodal peaks)."""
    grid = grid or GridSpec()
    xs = np.linspace(0.0, 1.0, grid.points)
    value, _ = _refined_max(lambda u: np.abs(f(u)), xs, grid.refine)
    return value


def weighted_sup_norm(f: Callable, lam: float, grid: Optional[GridSpec] = None) -> float:
    """max |phi^lam f| on [0, 1]."""
    grid = grid or GridSpec()
    xs = np.linspace(0.0, 1.0, grid.points)
    value, _ = _refined_max(lambda u: _phi_power(u, lam) * np.abs(f(u)), xs, grid.refine)
    return value


def _step_candidates(f: FunctionSpec, t: float, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Steps h tried at each x, shape (candidates, x.size).

    The largest feasible step h* = min(t, 2 min(x, 1-x) / phi^lam(x)), a
    geometric grid below it, and the steps that put x +- h phi^lam/2 on a
    breakpoint of f. Between two kinks of a piecewise-linear f the difference
    is linear in h, so its maximum sits on one of these.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        cap = np.where(w > 0.0, 2.0 * np.minimum(x, 1.0 - x) / w, 0.0)
        h_star = np.minimum(t, cap)
        rows = [h_star[None, :], _H_FRACTIONS[:, None] * h_star[None, :]]
        for s in f.breakpoints:
            kink = np.where(w > 0.0, 2.0 * np.abs(x - s) / w, 0.0)
            rows.append(np.minimum(kink, h_star)[None, :])
    return np.concatenate(rows, axis=0)


def _max_step_difference(f: FunctionSpec, lam: float, t: float, x: np.ndarray) -> np.ndarray:
    """max over feasible h <= t of |f(x + h phi^lam/2) - f(x - h phi^lam/2)|."""
    w = _phi_power(x, lam)
    half = 0.5 * _step_candidates(f, t, x, w) * w[None, :]
    left = np.clip(x[None, :] - half, 0.0, 1.0)
    right = np.clip(x[None, :] + half, 0.0, 1.0)
    return np.max(np.abs(f(right) - f(left)), axis=0)


def dt_modulus(q: ModulusQuery) -> float:
    """omega_{phi^lambda}(f; t) as a double supremum over steps h <= t and points x."""
    if q.f.is_constant:
        return 0.0
    xs = np.linspace(0.0, 1.0, q.grid.points)
    value, where = _refined_max(
        lambda u: _max_step_difference(q.f, q.lam, q.t, u), xs, q.grid.refine
    )
    logger.debug(
        "Modulus of %s (lambda=%g, t=%.3e) = %.6e at x=%.6f",
        q.f.label,
        q.lam,
        q.t,
        value,
        where,
    )
    return value


def classical_modulus(f: FunctionSpec, delta: float, grid: Optional[GridSpec] = None) -> float:
    """omega(f; delta) = sup over |u - v| <= delta of |f(u) - f(v)|."""
    return dt_modulus(ModulusQuery(f=f, lam=0.0, t=delta, grid=grid or GridSpec()))


def loglog_fit(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """Least-squares line through (log x, log y) over positive y: (slope, intercept, r^2)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    keep = (y > 0.0) & np.isfinite(y)
    if np.count_nonzero(keep) < 2:
        raise DegenerateFitError(
            f"log-log fit needs at least two positive samples, got {np.count_nonzero(keep)}"
        )
    result = stats.linregress(np.log(x[keep]), np.log(y[keep]))
    return float(result.slope), float(result.intercept), float(result.rvalue**2)


def modulus_fit(
    f: FunctionSpec,
    lam: float,
    t_list: Sequence[float],
    grid: Optional[GridSpec] = None,
) -> ModulusFit:
    grid = grid or GridSpec()
    ts = sorted(t_list, reverse=True)
    if ts and ts[0] / ts[-1] < 100.0:
        logger.warning("Modulus fit over %s spans less than two decades", ts)
    rows = [
        ModulusRow(t=t, omega=dt_modulus(ModulusQuery(f=f, lam=lam, t=t, grid=grid)))
        for t in ts
    ]
    try:
        slope, _, r2 = loglog_fit([r.t for r in rows], [r.omega for r in rows])
    except DegenerateFitError as e:
        logger.info("No modulus fit for %s: %s", f.label, e)
        return ModulusFit(f=f, lam=lam, rows=rows)
    logger.info("Modulus exponent of %s at lambda=%g: %.4f (r2 %.4f)", f.label, lam, slope, r2)
    return ModulusFit(f=f, lam=lam, rows=rows, gamma_hat=slope, r2=r2)


def modulus_exponent(
    f: FunctionSpec,
    lam: float,
    t_list: Sequence[float],
    grid: Optional[GridSpec] = None,
) -> Tuple[float, float]:
    """Slope of log omega against log t, with its r^2."""
    fit = modulus_fit(f, lam, t_list, grid)
    if fit.gamma_hat is None:
        raise DegenerateFitError(f"no modulus exponent for {f.label}: omega vanishes")
    return fit.gamma_hat, fit.r2
