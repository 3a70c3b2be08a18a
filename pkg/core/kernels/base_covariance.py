# core/kernels/base_covariance.py
"""Stationary covariances expressed as functions of a Euclidean distance Δ."""

from enum import Enum
from typing import Optional, Union

import numpy as np

from utils.error_handling import ConditionalBOError

SQRT5 = np.sqrt(5.0)

ArrayLike = Union[float, np.ndarray]


class NegativeDistanceError(ConditionalBOError, ValueError):
    """Exception raised when a covariance is evaluated at a negative distance."""
    pass


class BaseCovariance(str, Enum):
    """Selector for the distance-based covariance κ(Δ)."""
    EXP_QUADRATIC = "expquad"
    RATIONAL_QUADRATIC = "rq"
    MATERN52 = "matern52"

    @classmethod
    def parse(cls, value: Union[str, "BaseCovariance"]) -> "BaseCovariance":
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(c.value for c in cls)
            raise ValueError(f"Unknown base covariance '{value}'; expected one of {choices}")


def base_kappa(
    selector: BaseCovariance,
    delta: ArrayLike,
    amplitude: float,
    alpha: Optional[float] = None,
) -> ArrayLike:
    """Evaluate κ(Δ) elementwise.

    Args:
        selector: Which covariance to evaluate
        delta: Nonnegative distance(s)
        amplitude: Signal variance σ²
        alpha: Shape parameter, required for the rational quadratic

    Returns:
        Covariance value(s), same shape as `delta`

    Raises:
        NegativeDistanceError: If any distance is negative
    """
    d = np.asarray(delta, dtype=float)
    if np.any(d < 0):
        raise NegativeDistanceError(f"Distance must be nonnegative, got min {d.min()}")

    if selector == BaseCovariance.EXP_QUADRATIC:
        value = amplitude * np.exp(-0.5 * d * d)
    elif selector == BaseCovariance.RATIONAL_QUADRATIC:
        if alpha is None or alpha <= 0:
            raise ValueError(f"Rational quadratic needs alpha > 0, got {alpha}")
        value = amplitude * (1.0 + d * d / (2.0 * alpha)) ** (-alpha)
    elif selector == BaseCovariance.MATERN52:
        r = SQRT5 * d
        value = amplitude * (1.0 + r + r * r / 3.0) * np.exp(-r)
    else:
        raise ValueError(f"Unsupported base covariance: {selector}")

    if np.ndim(delta) == 0:
        return float(value)
    return value
