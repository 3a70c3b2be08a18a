# core/inference/hyper_inference.py
"""Posterior over GP hyperparameters: log posterior, slice-sampled chains and MAP search."""

from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from config.app_config import config
from config.logging_config import get_module_logger
from core.gp.gp_model import (
    GpModel,
    SingularKernelError,
    fit,
    log_marginal_likelihood,
    predict_many,
)
from core.inference.priors import HyperParameterization, HyperPrior, KernelParams
from core.inference.slice_sampler import HyperState, slice_sweep
from core.kernels.arc_kernel import Kernel, KernelParamsError
from utils.error_handling import ConditionalBOError

# Create a logger for this module
logger = get_module_logger("hyper_inference")

# Stand-in for −inf in the line searches
_REJECTED = 1e300


class InferenceError(ConditionalBOError, ValueError):
    """Exception raised for invalid inference requests (no data, bad chain settings)."""
    pass


@dataclass(frozen=True, eq=False)
class HyperSample:
    """One posterior (or MAP) hyperparameter setting."""
    params: KernelParams
    noise_var: float
    theta: np.ndarray
    log_posterior: float


class HyperModel:
    """Log posterior of the hyperparameters of a GP on fixed training data.

    The targets are modelled as given (callers standardize them first, see
    OutputTransform); the constant mean is the target mean. The training geometry is
    computed once and shared by every evaluation.
    """

    def __init__(
        self,
        kernel: Kernel,
        inputs: Any,
        targets: np.ndarray,
        prior: Optional[HyperPrior] = None,
        noise_floor: Optional[float] = None,
    ):
        targets = np.asarray(targets, dtype=float).ravel()
        if targets.shape[0] == 0:
            raise InferenceError("Hyperparameter inference needs at least one observation")
        self.kernel = kernel
        self.inputs = inputs
        self.targets = targets
        self.prior = prior or HyperPrior()
        self.parameterization = HyperParameterization.for_params(kernel.params, noise_floor)
        self.geometry = kernel.geometry(inputs, inputs)

    @property
    def size(self) -> int:
        return self.parameterization.size

    def log_prior(self, theta: np.ndarray) -> float:
        return self.parameterization.log_prior(theta, self.prior)

    def fit(self, theta: np.ndarray) -> GpModel:
        """Condition the GP at an unconstrained hyperparameter vector.

        Raises:
            SingularKernelError: If the kernel matrix cannot be factorized
            KernelParamsError: If theta maps to invalid hyperparameters
        """
        params, noise = self.parameterization.unpack(theta)
        return fit(
            self.kernel.with_params(params),
            self.inputs,
            self.targets,
            noise,
            geometry=self.geometry,
        )

    def log_posterior(self, theta: np.ndarray) -> float:
        """Prior plus log marginal likelihood; −inf wherever the GP cannot be fitted."""
        value = self.log_prior(theta)
        if not np.isfinite(value):
            return -np.inf
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                value += log_marginal_likelihood(self.fit(theta))
        except (SingularKernelError, KernelParamsError, FloatingPointError, ValueError) as e:
            logger.debug(f"Rejected hyperparameters: {e}")
            return -np.inf
        return value if np.isfinite(value) else -np.inf

    def sample(self, theta: np.ndarray, log_posterior: Optional[float] = None) -> HyperSample:
        params, noise = self.parameterization.unpack(theta)
        if log_posterior is None:
            log_posterior = self.log_posterior(theta)
        return HyperSample(params, noise, np.array(theta, dtype=float), float(log_posterior))


def log_posterior(model: HyperModel, state: HyperState) -> float:
    """Log posterior at a chain state's parameter vector."""
    return model.log_posterior(state.theta)


def _finite_start(model: HyperModel, rng: np.random.Generator, first: np.ndarray) -> np.ndarray:
    """The given start if its posterior is finite, otherwise the first finite prior draw."""
    theta = np.array(first, dtype=float)
    for _ in range(50):
        if np.isfinite(model.log_posterior(theta)):
            return theta
        theta = model.parameterization.sample_prior(model.prior, rng)
    raise SingularKernelError("No hyperparameter setting with a finite posterior was found")


def sample_hypers(
    model: HyperModel,
    n_samples: Optional[int] = None,
    burn_in: Optional[int] = None,
    thin: Optional[int] = None,
    seed: int = 0,
    initial_theta: Optional[np.ndarray] = None,
    width: Optional[float] = None,
    max_stepout: Optional[int] = None,
) -> List[HyperSample]:
    """Draw posterior hyperparameter samples with a coordinate-wise slice sampler.

    Args:
        model: Hyperparameter posterior for the training data
        n_samples: Number of returned samples, >= 1
        burn_in: Sweeps discarded before the first sample
        thin: Sweeps between returned samples (and before the first one after burn-in)
        seed: Chain seed; (seed, data, initial_theta) determine the output
        initial_theta: Starting vector, e.g. the last sample of a previous chain;
            defaults to the prior median
        width: Slice width in unconstrained space
        max_stepout: Step-out budget per coordinate update

    Returns:
        n_samples HyperSample objects in chain order

    Raises:
        InferenceError: If n_samples < 1 or burn_in/thin are invalid
        SingularKernelError: If no starting point with a finite posterior exists
    """
    n_samples = config.inference.n_samples if n_samples is None else n_samples
    burn_in = config.inference.burn_in if burn_in is None else burn_in
    thin = config.inference.thin if thin is None else thin
    if n_samples < 1:
        raise InferenceError(f"n_samples must be >= 1, got {n_samples}")
    if burn_in < 0 or thin < 1:
        raise InferenceError(f"Need burn_in >= 0 and thin >= 1, got {burn_in} and {thin}")

    rng = np.random.default_rng(seed)
    start = model.parameterization.median(model.prior) if initial_theta is None else initial_theta
    theta = _finite_start(model, rng, start)
    state = HyperState(theta=theta, log_density=model.log_posterior(theta), rng=rng)

    for _ in range(burn_in):
        state = slice_sweep(state, model.log_posterior, width, max_stepout)

    samples = []
    for _ in range(n_samples):
        for _ in range(thin):
            state = slice_sweep(state, model.log_posterior, width, max_stepout)
        samples.append(model.sample(state.theta, state.log_density))

    logger.debug(
        f"Slice chain seed={seed}: {burn_in} burn-in sweeps, {n_samples}x{thin} sampling sweeps, "
        f"final log posterior {state.log_density:.4f}"
    )
    return samples


def _line_search(
    model: HyperModel, theta: np.ndarray, axis: int, current: float, bracket: float, max_iter: int
) -> Tuple[np.ndarray, float]:
    def objective(value: float) -> float:
        trial = theta.copy()
        trial[axis] = value
        score = model.log_posterior(trial)
        return -score if np.isfinite(score) else _REJECTED

    center = theta[axis]
    result = minimize_scalar(
        objective,
        bounds=(center - bracket, center + bracket),
        method="bounded",
        options={"maxiter": max_iter, "xatol": 1e-3},
    )
    if result.fun < _REJECTED and -result.fun > current:
        improved = theta.copy()
        improved[axis] = result.x
        return improved, float(-result.fun)
    return theta, current


def map_optimize(
    model: HyperModel,
    restarts: int = 3,
    seed: int = 0,
    sweeps: int = 3,
    max_iter: int = 50,
    bracket: float = 2.0,
) -> HyperSample:
    """Maximize the log posterior by coordinate descent from several starts.

    The first start is the prior median, the others are prior draws. Each axis is
    searched with a bounded golden-section/parabolic line search on
    [θ_i − bracket, θ_i + bracket]; a move is kept only if it improves the score.

    Args:
        model: Hyperparameter posterior
        restarts: Number of starts, >= 1
        seed: Seed for the prior-drawn starts
        sweeps: Coordinate-descent passes per start
        max_iter: Iteration cap of each line search
        bracket: Half-width of each line-search interval in unconstrained space

    Returns:
        The best HyperSample found

    Raises:
        InferenceError: If restarts < 1
        SingularKernelError: If every start fails to produce a finite posterior
    """
    if restarts < 1:
        raise InferenceError(f"restarts must be >= 1, got {restarts}")

    rng = np.random.default_rng(seed)
    starts = [model.parameterization.median(model.prior)]
    starts += [model.parameterization.sample_prior(model.prior, rng) for _ in range(restarts - 1)]

    best: Optional[HyperSample] = None
    for index, theta in enumerate(starts):
        score = model.log_posterior(theta)
        if not np.isfinite(score):
            logger.debug(f"MAP start {index} has non-finite posterior; skipped")
            continue
        for _ in range(sweeps):
            before = score
            for axis in range(model.size):
                theta, score = _line_search(model, theta, axis, score, bracket, max_iter)
            if score - before < 1e-6:
                break
        if best is None or score > best.log_posterior:
            best = model.sample(theta, score)

    if best is None:
        raise SingularKernelError(f"All {restarts} MAP starts failed to fit")
    logger.debug(f"MAP log posterior {best.log_posterior:.4f} after {restarts} starts")
    return best


def fit_samples(model: HyperModel, samples: Sequence[HyperSample]) -> List[GpModel]:
    """Fitted GP per sample; samples that fail to fit are skipped."""
    models = []
    for sample in samples:
        try:
            models.append(model.fit(sample.theta))
        except (SingularKernelError, KernelParamsError) as e:
            logger.warning(f"Skipping hyperparameter sample that failed to fit: {e}")
    if not models:
        raise SingularKernelError("No hyperparameter sample could be fitted")
    return models


def predict_mixture(
    model: HyperModel, samples: Sequence[HyperSample], test_inputs: Any
) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and variance of the equal-weight mixture of per-sample GP posteriors."""
    gps = fit_samples(model, samples)
    geometry = model.kernel.geometry(model.inputs, test_inputs)
    means, second = [], []
    for gp in gps:
        mean, var = predict_many(gp, test_inputs, geometry=geometry)
        means.append(mean)
        second.append(var + mean * mean)
    mixture_mean = np.mean(means, axis=0)
    mixture_var = np.maximum(np.mean(second, axis=0) - mixture_mean ** 2, 0.0)
    return mixture_mean, mixture_var
