# core/gp/gp_model.py
"""Exact Gaussian-process regression with a constant mean and optional log warping."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Tuple

import numpy as np
import scipy.linalg as spla

from config.logging_config import get_module_logger
from core.kernels.arc_kernel import Kernel
from utils.error_handling import ConditionalBOError

logger = get_module_logger("gp_model")

# Diagonal jitter levels, as multiples of trace(K)/n
JITTER_LADDER = (0.0, 1e-10, 1e-8, 1e-6, 1e-4)

LOG_2PI = np.log(2.0 * np.pi)


class SingularKernelError(ConditionalBOError):
    """Exception raised when the kernel matrix cannot be factorized at any jitter level."""
    pass


class WarpDomainError(ConditionalBOError, ValueError):
    """Exception raised when the log warp meets a nonpositive target."""
    pass


class GpInputError(ConditionalBOError, ValueError):
    """Exception raised for empty or non-finite training data or a nonpositive noise."""
    pass


class Warp(str, Enum):
    """Output warping applied before modelling."""
    IDENTITY = "identity"
    LOG = "log"


def apply_warp(raw_targets: np.ndarray, warp: Warp) -> np.ndarray:
    """Map raw targets into the modelled space.

    Raises:
        WarpDomainError: If warp is log and a target is nonpositive
    """
    raw_targets = np.asarray(raw_targets, dtype=float)
    if Warp(warp) == Warp.LOG:
        if np.any(raw_targets <= 0):
            raise WarpDomainError(
                f"Log warp needs positive targets, got min {raw_targets.min()}"
            )
        return np.log(raw_targets)
    return raw_targets.copy()


@dataclass(frozen=True, eq=False)
class GpModel:
    """A fitted GP. Immutable; `predict` is safe under concurrent callers."""
    kernel: Kernel
    inputs: Any
    raw_targets: np.ndarray
    targets: np.ndarray
    noise_var: float
    mean_const: float
    warp: Warp
    jitter: float
    chol: np.ndarray
    alpha_vec: np.ndarray

    @property
    def n(self) -> int:
        return self.targets.shape[0]


def fit(
    kernel: Kernel,
    inputs: Any,
    raw_targets: np.ndarray,
    noise_var: float,
    mean_const: Optional[float] = None,
    warp: Warp = Warp.IDENTITY,
    geometry: Any = None,
) -> GpModel:
    """Condition a GP on training data.

    The factorization of K + noise·I is attempted with escalating diagonal jitter
    (JITTER_LADDER times trace(K)/n) until it succeeds.

    Args:
        kernel: Covariance function with its hyperparameters
        inputs: Training inputs (Points for the arc kernel, an (n, m) array for plain kernels)
        raw_targets: n observed values, before warping
        noise_var: Observation noise variance, > 0
        mean_const: Constant prior mean in warped space; defaults to the warped-target mean
        warp: Output warping
        geometry: Optional precomputed `kernel.geometry(inputs, inputs)`

    Returns:
        Fitted GpModel

    Raises:
        GpInputError: If there is no data, a target is non-finite or noise_var <= 0
        WarpDomainError: If warp is log and a target is nonpositive
        SingularKernelError: If factorization fails at the largest jitter
    """
    raw_targets = np.asarray(raw_targets, dtype=float).ravel()
    n = raw_targets.shape[0]
    if n == 0:
        raise GpInputError("GP needs at least one training point")
    if kernel.n_inputs(inputs) != n:
        raise GpInputError(f"{kernel.n_inputs(inputs)} inputs but {n} targets")
    if not np.all(np.isfinite(raw_targets)):
        raise GpInputError("Training targets must be finite")
    if not noise_var > 0:
        raise GpInputError(f"noise_var must be > 0, got {noise_var}")

    targets = apply_warp(raw_targets, warp)
    if mean_const is None:
        mean_const = float(np.mean(targets))

    if geometry is None:
        geometry = kernel.geometry(inputs, inputs)
    K = kernel.covariance(geometry)
    scale = np.trace(K) / n

    chol = None
    used_jitter = 0.0
    for level in JITTER_LADDER:
        used_jitter = level * scale
        try:
            chol = spla.cholesky(
                K + (noise_var + used_jitter) * np.eye(n), lower=True, check_finite=True
            )
            break
        except (np.linalg.LinAlgError, ValueError):
            logger.debug(f"Cholesky failed at jitter {used_jitter:.3g}, escalating")
            chol = None
    if chol is None:
        raise SingularKernelError(
            f"Kernel matrix not positive definite at max jitter {used_jitter:.3g} (n={n})"
        )

    alpha_vec = spla.cho_solve((chol, True), targets - mean_const)
    return GpModel(
        kernel=kernel,
        inputs=inputs,
        raw_targets=raw_targets,
        targets=targets,
        noise_var=float(noise_var),
        mean_const=float(mean_const),
        warp=Warp(warp),
        jitter=float(used_jitter),
        chol=chol,
        alpha_vec=alpha_vec,
    )


def predict_many(model: GpModel, inputs: Any, geometry: Any = None) -> Tuple[np.ndarray, np.ndarray]:
    """Posterior mean and variance of the latent function at several inputs, in warped space.

    Args:
        model: Fitted GP
        inputs: Test inputs of the same kind as the training inputs
        geometry: Optional precomputed `model.kernel.geometry(model.inputs, inputs)`

    Returns:
        (means, variances), variances clamped at 0
    """
    if geometry is None:
        geometry = model.kernel.geometry(model.inputs, inputs)
    k_star = model.kernel.covariance(geometry)
    means = model.mean_const + k_star.T @ model.alpha_vec
    v = spla.solve_triangular(model.chol, k_star, lower=True)
    variances = model.kernel.prior_variance(inputs) - np.sum(v * v, axis=0)
    return means, np.maximum(variances, 0.0)


def predict(model: GpModel, x: Any) -> Tuple[float, float]:
    """Posterior (mean, variance) at a single input, in warped space."""
    inputs = [x] if not isinstance(x, np.ndarray) else np.atleast_2d(x)
    means, variances = predict_many(model, inputs)
    return float(means[0]), float(variances[0])


def log_marginal_likelihood(model: GpModel) -> float:
    """log p(y | X, θ) of the (warped) targets.

    For the log warp the Jacobian −Σ log(raw) is added, so the value is a density over
    the raw targets and comparable across warps.
    """
    residual = model.targets - model.mean_const
    value = (
        -0.5 * float(residual @ model.alpha_vec)
        - float(np.sum(np.log(np.diag(model.chol))))
        - 0.5 * model.n * LOG_2PI
    )
    if model.warp == Warp.LOG:
        value -= float(np.sum(np.log(model.raw_targets)))
    return value
