"""Beta-distribution moments, Beta-weighted quadrature and the smoothing functional.

For a degree ``m`` and index ``k`` the functional is the expectation of
``f(beta * t + (1 - beta) * k/m)`` with ``t ~ Beta(m*k, m*(m-k))``. The
generalized operator of degree n uses ``m = n - 1``; the beta-Bernstein
operator uses ``m = n``.
"""

import logging
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import legendre
from scipy import special

from bbops.config_models import QuadratureSpec, QuadratureStrategy
from bbops.errors import DomainError, QuadratureError
from bbops.functions import FunctionSpec, monomial
from bbops.report_models import CheckReport

logger = logging.getLogger(__name__)

# rows integrated together in the vectorized windowed rule
_CHUNK = 512


def log_beta(p: float, q: float) -> float:
    """ln B(p, q)."""
    if not (p > 0.0 and q > 0.0):
        raise DomainError(f"log_beta needs p, q > 0, got ({p}, {q})")
    return float(special.betaln(p, q))


def _moment_table(a: np.ndarray, b: np.ndarray, jmax: int) -> np.ndarray:
    """E[t^r] for r = 0..jmax, one row per (a, b) pair.

    Uses the product recurrence E[t^r] = prod_{i<r} (a+i)/(a+b+i); b = 0 rows
    are the point mass at 1 and a = 0 rows the point mass at 0.
    """
    a = np.asarray(a, dtype=float)[:, None]
    b = np.asarray(b, dtype=float)[:, None]
    i = np.arange(jmax, dtype=float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        factors = np.where(a + b + i > 0.0, (a + i) / (a + b + i), 1.0)
    ones = np.ones((a.shape[0], 1))
    return np.concatenate([ones, np.cumprod(factors, axis=1)], axis=1)


def beta_moment(a: float, b: float, j: int) -> float:
    """E[t^j] for t ~ Beta(a, b); b = 0 is the point mass at t = 1."""
    if not a > 0.0 or b < 0.0:
        raise DomainError(f"beta_moment needs a > 0 and b >= 0, got ({a}, {b})")
    if j < 0 or int(j) != j:
        raise DomainError(f"moment order must be a nonnegative integer, got {j}")
    if b == 0.0:
        return 1.0
    return float(_moment_table(np.array([a]), np.array([b]), int(j))[0, int(j)])


def _composite_rule(
    edges: np.ndarray, ref_nodes: np.ndarray, ref_weights: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on every panel of each row of ``edges``."""
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    half = 0.5 * (edges[:, 1:] - edges[:, :-1])
    nodes = mid[..., None] + half[..., None] * ref_nodes
    weights = half[..., None] * ref_weights
    rows = edges.shape[0]
    return nodes.reshape(rows, -1), weights.reshape(rows, -1)


def _bisect_panels(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:, 1:] + edges[:, :-1])
    out = np.empty((edges.shape[0], 2 * edges.shape[1] - 1))
    out[:, 0::2] = edges
    out[:, 1::2] = mids
    return out


def _graded_edges(
    lo: float, hi: float, panels: int, cuts: Sequence[float], singular: Sequence[float],
    quad: QuadratureSpec,
) -> np.ndarray:
    """Uniform panels on [lo, hi] split at ``cuts``, graded geometrically toward ``singular``."""
    edges = set(np.linspace(lo, hi, panels + 1).tolist())
    edges.update(c for c in cuts if lo < c < hi)
    width = (hi - lo) / panels
    for s in singular:
        if not lo < s < hi:
            continue
        for level in range(1, quad.grading_levels + 1):
            step = width * quad.grading_ratio**level
            for point in (s - step, s + step):
                if lo < point < hi:
                    edges.add(point)
    return np.array(sorted(edges))[None, :]


def _integrate_rows(
    f: Callable[[np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    scale: float,
    shift: np.ndarray,
    edges: np.ndarray,
    quad: QuadratureSpec,
    ref: Tuple[np.ndarray, np.ndarray],
) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized Beta(a, b) expectation of f(scale*t + shift) on each row's panels.

    Returns the value from the finest panel set and the difference to the
    previous one; panels are bisected until the difference is negligible or
    ``quad.max_doublings`` is reached.
    """
    c = a / (a + b)

    def rule(panel_edges: np.ndarray) -> np.ndarray:
        t, w = _composite_rule(panel_edges, *ref)
        cc = c[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logw = (a[:, None] - 1.0) * np.log1p((t - cc) / cc) + (
                b[:, None] - 1.0
            ) * np.log1p(-(t - cc) / (1.0 - cc))
        logw = np.where(np.isfinite(logw), logw, -np.inf)
        logw -= np.max(logw, axis=1, keepdims=True)
        dens = np.exp(logw) * w
        s = np.clip(scale * t + shift[:, None], 0.0, 1.0)
        return np.sum(dens * f(s), axis=1) / np.sum(dens, axis=1)

    coarse = rule(edges)
    fine = coarse
    err = np.full_like(coarse, np.inf)
    for doubling in range(quad.max_doublings + 1):
        edges = _bisect_panels(edges)
        fine = rule(edges)
        err = np.abs(fine - coarse)
        if np.all(err <= 1e-13 * np.maximum(1.0, np.abs(fine))):
            break
        logger.debug(
            "Quadrature refinement %d: max difference %.3e", doubling + 1, err.max()
        )
        coarse = fine
    return fine, err


def _tail_mass(a: np.ndarray, b: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return special.betainc(a, b, lo) + (1.0 - special.betainc(a, b, hi))


def _window(
    a: np.ndarray, b: np.ndarray, quad: QuadratureSpec
) -> Tuple[np.ndarray, np.ndarray]:
    if quad.strategy == QuadratureStrategy.FULL_COMPOSITE:
        return np.zeros_like(a), np.ones_like(a)
    s = a + b
    c = a / s
    sigma = np.sqrt(a * b / (s * s * (s + 1.0)))
    lo = np.maximum(0.0, c - quad.window_sigmas * sigma)
    hi = np.minimum(1.0, c + quad.window_sigmas * sigma)

    # skewed shapes: widen to the quantiles cutting off eps on each side
    eps = 1e-4 * quad.tolerance
    wide = _tail_mass(a, b, lo, hi) > 2.0 * eps
    if np.any(wide):
        q_lo = special.betaincinv(a[wide], b[wide], eps)
        q_hi = special.betaincinv(a[wide], b[wide], 1.0 - eps)
        lo[wide] = np.clip(np.minimum(lo[wide], q_lo), 0.0, 1.0)
        hi[wide] = np.clip(np.maximum(hi[wide], q_hi), 0.0, 1.0)
        logger.debug(
            "Widened the quadrature window for %d skewed rows", int(np.count_nonzero(wide))
        )
    return lo, hi


def _quadrature(
    f: FunctionSpec,
    a: np.ndarray,
    b: np.ndarray,
    scale: float,
    shift: np.ndarray,
    quad: QuadratureSpec,
    label: str,
) -> np.ndarray:
    """Vectorized windowed Gauss-Legendre expectation for rows with a, b > 0."""
    ref = legendre.leggauss(quad.nodes)
    ref = (ref[0], ref[1])
    lo, hi = _window(a, b, quad)
    c = a / (a + b)
    values = np.empty_like(a)
    errors = np.empty_like(a)

    # breakpoints of f mapped back into t
    cuts_s = np.asarray(f.breakpoints, dtype=float)
    singular_s = np.asarray(f.singular_points, dtype=float)
    if cuts_s.size:
        cuts_t = (cuts_s[None, :] - shift[:, None]) / scale
        special_rows = np.any((cuts_t > lo[:, None]) & (cuts_t < hi[:, None]), axis=1)
    else:
        cuts_t = np.empty((a.size, 0))
        special_rows = np.zeros(a.size, dtype=bool)

    regular = np.flatnonzero(~special_rows)
    unit = np.linspace(0.0, 1.0, quad.panels + 1)[None, :]
    for start in range(0, regular.size, _CHUNK):
        idx = regular[start : start + _CHUNK]
        edges = lo[idx, None] + (hi[idx] - lo[idx])[:, None] * unit
        values[idx], errors[idx] = _integrate_rows(
            f, a[idx], b[idx], scale, shift[idx], edges, quad, ref
        )

    for i in np.flatnonzero(special_rows):
        singular_t = (singular_s - shift[i]) / scale if singular_s.size else ()
        edges = _graded_edges(
            lo[i], hi[i], quad.panels, cuts_t[i].tolist(), list(singular_t), quad
        )
        v, e = _integrate_rows(
            f, a[i : i + 1], b[i : i + 1], scale, shift[i : i + 1], edges, quad, ref
        )
        values[i], errors[i] = v[0], e[0]

    sup_f = max(1.0, float(np.max(np.abs(f(np.linspace(0.0, 1.0, 257))))))
    total = errors + 2.0 * sup_f * _tail_mass(a, b, lo, hi)
    worst = int(np.argmax(total)) if total.size else 0
    if total.size and total[worst] > quad.tolerance:
        raise QuadratureError(
            f"{label}: estimated error {total[worst]:.3e} exceeds "
            f"{quad.tolerance:.1e} (row mean {c[worst]:.6g}, "
            f"shapes a={a[worst]:.6g}, b={b[worst]:.6g})"
        )
    return values


def beta_expectation(
    a: float,
    b: float,
    f: FunctionSpec,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """E[f(t)] for t ~ Beta(a, b) by windowed Gauss-Legendre quadrature."""
    quad = quad or QuadratureSpec()
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta_expectation needs a, b > 0, got ({a}, {b})")
    values = _quadrature(
        f,
        np.array([float(a)]),
        np.array([float(b)]),
        1.0,
        np.zeros(1),
        quad,
        f"E[{f.label}] under Beta({a:g}, {b:g})",
    )
    return float(values[0])


def _exact_poly(
    f: FunctionSpec, a: np.ndarray, b: np.ndarray, anchor: np.ndarray, beta: float
) -> np.ndarray:
    """Binomial expansion of (beta t + (1-beta) anchor)^i against Beta moments."""
    coeffs = np.asarray(f.coeffs, dtype=float)
    degree = len(coeffs) - 1
    moments = _moment_table(a, b, degree)
    total = np.zeros_like(anchor)
    for i, c in enumerate(coeffs):
        if c == 0.0:
            continue
        r = np.arange(i + 1)
        weights = special.comb(i, r) * beta**r * (1.0 - beta) ** (i - r)
        powers = anchor[:, None] ** (i - r)[None, :]
        total += c * np.sum(weights[None, :] * powers * moments[:, : i + 1], axis=1)
    return total


@lru_cache(maxsize=256)
def _functional_values_cached(
    degree: int, beta: float, f: FunctionSpec, quad: QuadratureSpec
) -> np.ndarray:
    m = degree
    k = np.arange(m + 1, dtype=float)
    anchor = k / m
    values = np.empty(m + 1)
    values[0] = float(f(0.0))
    values[m] = float(f(1.0))
    if m >= 2:
        a = m * k[1:m]
        b = m * (m - k[1:m])
        inner_anchor = anchor[1:m]
        if f.polynomial_degree is not None:
            values[1:m] = _exact_poly(f, a, b, inner_anchor, beta)
        elif quad.strategy == QuadratureStrategy.EXACT_POLY:
            raise DomainError(
                f"exact-poly quadrature needs a polynomial function, got {f.label}"
            )
        elif beta == 0.0:
            values[1:m] = f(inner_anchor)
        else:
            values[1:m] = _quadrature(
                f,
                a,
                b,
                beta,
                (1.0 - beta) * inner_anchor,
                quad,
                f"functional of {f.label} at degree {m}, beta={beta:g}",
            )
    logger.debug(
        "Computed %d functional values for %s (degree %d, beta %g)",
        m + 1,
        f.label,
        m,
        beta,
    )
    values.setflags(write=False)
    return values


def functional_values(
    degree: int, beta: float, f: FunctionSpec, quad: Optional[QuadratureSpec] = None
) -> np.ndarray:
    """F_{degree,k}(f) for k = 0..degree, endpoints included (f(0) and f(1)).

    The result is cached per (degree, beta, f, quad) and read-only.
    """
    if degree < 1 or int(degree) != degree:
        raise DomainError(f"functional degree must be a positive integer, got {degree}")
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    return _functional_values_cached(int(degree), float(beta), f, quad or QuadratureSpec())


def f_functional(
    n: int,
    k: int,
    beta: float,
    f: FunctionSpec,
    quad: Optional[QuadratureSpec] = None,
) -> float:
    """F_{n-1,k}^{(beta)}(f); k = n-1 is the point mass at 1 and returns f(1)."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not 1 <= k <= n - 1:
        raise DomainError(f"index k={k} outside [1, {n - 1}]")
    return float(functional_values(n - 1, beta, f, quad)[k])


def f_functional_moment(n: int, k: int, beta: float, j: int) -> float:
    """Closed forms of F_{n-1,k}^{(beta)}(t^j) for j = 0, 1, 2."""
    if j not in (0, 1, 2):
        raise DomainError(f"closed-form functional moments exist for j <= 2, got {j}")
    if n < 2 or not 1 <= k <= n - 1:
        raise DomainError(f"index k={k} outside [1, {n - 1}]")
    m = n - 1
    anchor = k / m
    if j == 0:
        return 1.0
    if j == 1:
        return anchor
    mix = beta**2 / (m**2 + 1)
    return mix * anchor + (1.0 - mix) * anchor**2


def lemma1_check(
    n_max: int = 40,
    betas: Iterable[float] = (0.0, 0.25, 0.5, 1.0),
    quad: Optional[QuadratureSpec] = None,
    tolerance: float = 1e-10,
) -> CheckReport:
    """Functional of t^j against the closed forms, every n <= n_max and k."""
    worst, where, samples = 0.0, {}, 0
    for j in (0, 1, 2):
        f = monomial(j)
        for beta in betas:
            for n in range(2, n_max + 1):
                values = functional_values(n - 1, beta, f, quad)
                for k in range(1, n):
                    gap = abs(values[k] - f_functional_moment(n, k, beta, j))
                    samples += 1
                    if gap > worst:
                        worst, where = gap, {"n": n, "k": k, "beta": beta, "j": j}
    passed = bool(worst <= tolerance)
    if not passed:
        logger.warning("Functional moment check failed: gap %.3e at %s", worst, where)
    return CheckReport(
        name="lemma1",
        anchor="Lemma 1",
        passed=passed,
        max_violation=worst,
        tolerance=tolerance,
        location=where,
        samples=samples,
    )
