"""Bernstein, Bezier and generalized bases on [0, 1] and their derivatives.

The ``*_matrix`` helpers evaluate a whole basis for an array of points and
return shape ``x.shape + (number_of_functions,)``; the scalar operations are
thin wrappers around them. Everything here is pure.
"""

import logging

import numpy as np
from scipy import stats

from bbops.errors import DomainError

logger = logging.getLogger(__name__)


def _check_x(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return x


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"degree n must be a positive integer, got {n}")


def _check_index(k, top: int) -> None:
    if int(k) != k or not 0 <= k <= top:
        raise DomainError(f"index k={k} must be an integer in [0, {top}]")


def _check_alpha(alpha: float) -> None:
    if not alpha >= 1.0:
        raise DomainError(f"alpha must be >= 1, got {alpha}")


def binom_basis_matrix(n: int, x) -> np.ndarray:
    """p_{n,k}(x) for k = 0..n.

    The pmf is evaluated in log space by scipy's binomial distribution, which
    keeps full relative accuracy up to n ~ 1e4 and returns exact 0/1 at the
    endpoints.
    """
    _check_n(n)
    x = _check_x(x)
    k = np.arange(n + 1)
    return stats.binom.pmf(k, n, x[..., None])


def binom_basis(n: int, k: int, x: float) -> float:
    _check_index(k, n)
    return float(binom_basis_matrix(n, x)[..., int(k)])


def bezier_basis_matrix(n: int, x) -> np.ndarray:
    """J_{n,k}(x) for k = 0..n+1, with J_{n,0} = 1 and J_{n,n+1} = 0."""
    p = binom_basis_matrix(n, x)
    tails = np.cumsum(p[..., ::-1], axis=-1)[..., ::-1]
    J = np.concatenate([tails, np.zeros(p.shape[:-1] + (1,))], axis=-1)
    J[..., 0] = 1.0
    return np.clip(J, 0.0, 1.0)


def bezier_basis_all(n: int, x: float) -> np.ndarray:
    _check_n(n)
    return bezier_basis_matrix(n, float(x))


def q_basis_matrix(n: int, alpha: float, x) -> np.ndarray:
    """Q^{(alpha)}_{n,k}(x) = J_{n,k}^alpha - J_{n,k+1}^alpha for k = 0..n."""
    _check_alpha(alpha)
    J = bezier_basis_matrix(n, x)
    if alpha == 1.0:
        return np.clip(J[..., :-1] - J[..., 1:], 0.0, None)
    Ja = J**alpha
    return np.clip(Ja[..., :-1] - Ja[..., 1:], 0.0, None)


def q_basis(n: int, k: int, alpha: float, x: float) -> float:
    _check_index(k, n)
    return float(q_basis_matrix(n, alpha, x)[..., int(k)])


def binom_basis_deriv_matrix(n: int, x) -> np.ndarray:
    """p'_{n,k}(x) for k = 0..n.

    Interior points use n / phi^2(x) * (k/n - x) * p_{n,k}(x); the endpoints
    use n * (p_{n-1,k-1} - p_{n-1,k}), which gives the exact boundary values
    (p'_{n,1}(0) = n, p'_{n,n-1}(1) = -n, ...).
    """
    x = _check_x(x)
    _check_n(n)
    k = np.arange(n + 1)
    p = binom_basis_matrix(n, x)
    xe = x[..., None]
    phi2 = xe * (1.0 - xe)
    interior = phi2 > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(interior, n / phi2 * (k / n - xe) * p, 0.0)
    if np.any(~interior):
        lower = binom_basis_matrix(n - 1, x) if n > 1 else np.ones(x.shape + (1,))
        zeros = np.zeros(x.shape + (1,))
        shifted = np.concatenate([zeros, lower], axis=-1)
        unshifted = np.concatenate([lower, zeros], axis=-1)
        boundary = n * (shifted - unshifted)
        d = np.where(interior, d, boundary)
    return d


def binom_basis_deriv(n: int, k: int, x: float) -> float:
    _check_index(k, n)
    return float(binom_basis_deriv_matrix(n, x)[..., int(k)])


def bezier_basis_deriv_matrix(n: int, x) -> np.ndarray:
    """J'_{n,k}(x) for k = 0..n+1: n p_{n-1,k-1}(x) for 1 <= k <= n, else 0."""
    _check_n(n)
    x = _check_x(x)
    if n == 1:
        lower = np.ones(x.shape + (1,))
    else:
        lower = binom_basis_matrix(n - 1, x)
    zeros = np.zeros(x.shape + (1,))
    return np.concatenate([zeros, n * lower, zeros], axis=-1)


def bezier_basis_deriv(n: int, k: int, x: float) -> float:
    _check_index(k, n + 1)
    return float(bezier_basis_deriv_matrix(n, x)[..., int(k)])


def q_basis_deriv_matrix(n: int, alpha: float, x) -> np.ndarray:
    """(Q^{(alpha)}_{n,k})'(x) = alpha [J_k^{alpha-1} J'_k - J_{k+1}^{alpha-1} J'_{k+1}]."""
    _check_alpha(alpha)
    J = bezier_basis_matrix(n, x)
    dJ = bezier_basis_deriv_matrix(n, x)
    if alpha == 1.0:
        term = dJ
    else:
        term = alpha * J ** (alpha - 1.0) * dJ
    return term[..., :-1] - term[..., 1:]


def q_basis_deriv(n: int, k: int, alpha: float, x: float) -> float:
    _check_index(k, n)
    return float(q_basis_deriv_matrix(n, alpha, x)[..., int(k)])
