# core/bench/metrics.py
from typing import Dict, Sequence

import numpy as np

from utils.error_handling import ConditionalBOError


class MetricError(ConditionalBOError, ValueError):
    """Exception raised when a metric is undefined for its inputs."""
    pass


def nmse(predictions: Sequence[float], actuals: Sequence[float]) -> float:
    """Mean squared error divided by the population variance of the actuals.

    Raises:
        MetricError: On empty or unequal-length inputs, or constant actuals
    """
    predictions = np.asarray(predictions, dtype=float)
    actuals = np.asarray(actuals, dtype=float)
    if predictions.shape != actuals.shape or actuals.size == 0:
        raise MetricError(
            f"Need equal nonzero lengths, got {predictions.shape} and {actuals.shape}"
        )
    variance = float(np.var(actuals))
    if variance == 0.0:
        raise MetricError("NMSE is undefined for constant actuals")
    return float(np.mean((predictions - actuals) ** 2) / variance)


def mean_and_sd(values: Sequence[float]) -> Dict[str, float]:
    """Mean and sample standard deviation (0 for a single value)."""
    values = np.asarray(values, dtype=float)
    sd = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return {"mean": float(np.mean(values)), "sd": sd}
