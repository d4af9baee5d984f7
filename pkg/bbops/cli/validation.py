"""Validation functions for the bbops CLI."""

from typing import List, Optional, Sequence

from bbops.config_models import OperatorVariant


def validate_operator_options(
    variant: OperatorVariant,
    n_values: Sequence[int],
    alpha: float,
    beta: float,
) -> List[str]:
    """Check operator parameters and return a list of errors."""
    errors = []
    small = [n for n in n_values if n < 2]
    if small:
        errors.append(f"n must be at least 2, got {small[0]}")
    if alpha < 1.0:
        errors.append(f"--alpha must be >= 1, got {alpha:g}")
    if not 0.0 <= beta <= 1.0:
        errors.append(f"--beta must lie in [0, 1], got {beta:g}")
    if variant in (OperatorVariant.BERNSTEIN, OperatorVariant.BETA_BERNSTEIN) and alpha != 1.0:
        errors.append(f"--alpha does not apply to {variant.value}")
    if variant in (OperatorVariant.BERNSTEIN, OperatorVariant.BERNSTEIN_BEZIER) and beta != 0.0:
        errors.append(f"--beta does not apply to {variant.value}")
    return errors


def validate_points(
    xs: Sequence[float], lam: Optional[float] = None, ts: Sequence[float] = ()
) -> List[str]:
    errors = []
    outside = [x for x in xs if not 0.0 <= x <= 1.0]
    if outside:
        errors.append(f"--x values must lie in [0, 1], got {outside[0]:g}")
    if lam is not None and not 0.0 <= lam <= 1.0:
        errors.append(f"--lambda must lie in [0, 1], got {lam:g}")
    bad_t = [t for t in ts if not 0.0 < t <= 1.0]
    if bad_t:
        errors.append(f"--t values must lie in (0, 1], got {bad_t[0]:g}")
    return errors


def validate_derivative_request(variant: OperatorVariant) -> List[str]:
    if variant in (OperatorVariant.GENERALIZED, OperatorVariant.BERNSTEIN_BEZIER):
        return []
    return [f"--deriv is available for generalized and bernstein-bezier, not {variant.value}"]
