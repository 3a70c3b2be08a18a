# core/optimization/acquisition.py
from typing import Any, Sequence, Union

import numpy as np
from scipy.stats import norm

from core.gp.gp_model import GpModel, predict_many

ArrayLike = Union[float, np.ndarray]


def expected_improvement(mean: ArrayLike, variance: ArrayLike, incumbent: float) -> ArrayLike:
    """Expected improvement over `incumbent` for minimization.

    EI = (incumbent − μ)Φ(z) + sφ(z) with s = √variance and z = (incumbent − μ)/s;
    where s = 0 it is max(incumbent − μ, 0).

    Raises:
        ValueError: If any variance is negative
    """
    mean = np.asarray(mean, dtype=float)
    variance = np.asarray(variance, dtype=float)
    if np.any(variance < 0):
        raise ValueError(f"Variance must be nonnegative, got min {variance.min()}")

    gap = incumbent - mean
    s = np.sqrt(variance)
    positive = s > 0
    safe_s = np.where(positive, s, 1.0)
    z = gap / safe_s
    ei = np.where(positive, gap * norm.cdf(z) + safe_s * norm.pdf(z), np.maximum(gap, 0.0))
    # Far in the lower tail the closed form can round slightly below zero
    ei = np.maximum(ei, 0.0)
    if ei.ndim == 0:
        return float(ei)
    return ei


def per_sample_ei(
    models: Sequence[GpModel], inputs: Any, incumbent: float, geometry: Any = None
) -> np.ndarray:
    """EI under each fitted model, shape (n_models, n_inputs)."""
    rows = []
    for model in models:
        mean, var = predict_many(model, inputs, geometry=geometry)
        rows.append(expected_improvement(mean, var, incumbent))
    return np.vstack(rows)


def integrated_ei(
    models: Sequence[GpModel], inputs: Any, incumbent: float, geometry: Any = None
) -> np.ndarray:
    """EI averaged over hyperparameter samples, one value per input.

    Raises:
        ValueError: If no models are given
    """
    if len(models) == 0:
        raise ValueError("Integrated EI needs at least one hyperparameter sample")
    return np.mean(per_sample_ei(models, inputs, incumbent, geometry), axis=0)
