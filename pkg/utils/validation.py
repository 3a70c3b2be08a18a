# utils/validation.py
from typing import Iterable, Type

import numpy as np

from utils.error_handling import ConditionalBOError


def as_float_vector(values: Iterable[float], name: str = "values") -> np.ndarray:
    """Convert values to a read-only 1-D float array.

    Args:
        values: Sequence of numbers
        name: Name used in error messages

    Returns:
        A 1-D float64 array with the write flag cleared
    """
    array = np.array(values, dtype=float)
    if array.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {array.shape}")
    array.setflags(write=False)
    return array


def require_positive(
    values: np.ndarray, name: str, error: Type[Exception] = ConditionalBOError
) -> None:
    """Raise `error` unless every value is finite and strictly positive."""
    values = np.atleast_1d(values)
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise error(f"{name} must be finite and > 0, got {values.tolist()}")


def require_in_range(
    values: np.ndarray,
    name: str,
    lower: float,
    upper: float,
    error: Type[Exception] = ConditionalBOError,
) -> None:
    """Raise `error` unless lower <= value <= upper for every value."""
    values = np.atleast_1d(values)
    if not np.all(np.isfinite(values)) or np.any(values < lower) or np.any(values > upper):
        raise error(f"{name} must lie in [{lower}, {upper}], got {values.tolist()}")
