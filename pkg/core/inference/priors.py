# core/inference/priors.py
"""Hyperparameter priors and the unconstrained parameterization they are sampled in.

Positive quantities (ω_i, σ²) are sampled as θ = log x; extents ρ_i as u = logit ρ.
The noise variance is sampled as log(noise − floor), so the log-normal prior sits on
the excess over `noise_floor`, not on the noise itself.
Densities in unconstrained space include the Jacobian of the transform.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import stats
from scipy.special import expit, log_expit, logit

from config.app_config import config
from core.kernels.arc_kernel import ArcParams, Embedding, PlainParams
from core.kernels.base_covariance import BaseCovariance

KernelParams = Union[ArcParams, PlainParams]


@dataclass(frozen=True)
class HyperPrior:
    """Log-normal(log_mean, log_sd) on every positive hyperparameter; uniform[0, 1] on every ρ_i.

    The constant mean is not a sampled quantity; it is set from the data.
    """
    log_mean: float = 0.0
    log_sd: float = 1.0

    def log_positive(self, values: np.ndarray) -> float:
        """Log-density of positive values; −inf if any value is nonpositive."""
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0):
            return -np.inf
        return float(np.sum(stats.lognorm.logpdf(values, s=self.log_sd, scale=np.exp(self.log_mean))))

    def log_extent(self, rho: np.ndarray) -> float:
        """Log-density of extents; −inf outside [0, 1]."""
        return float(np.sum(stats.uniform.logpdf(np.asarray(rho, dtype=float))))

    def log_positive_unconstrained(self, theta: np.ndarray) -> float:
        # log x ~ Normal(log_mean, log_sd)
        return float(np.sum(stats.norm.logpdf(theta, loc=self.log_mean, scale=self.log_sd)))

    def log_extent_unconstrained(self, u: np.ndarray) -> float:
        # Uniform ρ pushed through the logit: density ρ(1 − ρ)
        u = np.asarray(u, dtype=float)
        return float(np.sum(log_expit(u) + log_expit(-u)))

    def sample_positive(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Unconstrained draws for positive hyperparameters."""
        return rng.normal(self.log_mean, self.log_sd, size=size)

    def sample_extent(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return logit(rng.uniform(size=size))


@dataclass(frozen=True)
class HyperParameterization:
    """Layout of the unconstrained vector.

    Arc kernels:   [log ω_1..ω_D, logit ρ_1..ρ_D, log σ², log(noise − floor)]
    Plain kernels: [log ω_1..ω_m, log σ², log(noise − floor)]
    """
    n_dims: int
    conditional: bool
    base: BaseCovariance = BaseCovariance.MATERN52
    alpha: Optional[float] = None
    embedding: Embedding = Embedding.ARC
    noise_floor: float = config.inference.noise_floor

    @classmethod
    def for_params(cls, params: KernelParams, noise_floor: Optional[float] = None) -> "HyperParameterization":
        floor = config.inference.noise_floor if noise_floor is None else noise_floor
        if isinstance(params, ArcParams):
            return cls(params.n_dims, True, params.base, params.alpha, params.embedding, floor)
        return cls(params.n_dims, False, params.base, params.alpha, Embedding.ARC, floor)

    @property
    def size(self) -> int:
        return (2 if self.conditional else 1) * self.n_dims + 2

    @property
    def rho_slice(self) -> slice:
        return slice(self.n_dims, 2 * self.n_dims) if self.conditional else slice(0, 0)

    @property
    def positive_index(self) -> np.ndarray:
        """Indices of the log-transformed coordinates."""
        index = np.arange(self.size)
        return index[(index < self.n_dims) | (index >= self.size - 2)]

    def names(self) -> List[str]:
        names = [f"log_omega_{i}" for i in range(self.n_dims)]
        if self.conditional:
            names += [f"logit_rho_{i}" for i in range(self.n_dims)]
        return names + ["log_amplitude", "log_noise"]

    def unpack(self, theta: np.ndarray) -> Tuple[KernelParams, float]:
        """Map an unconstrained vector to (kernel params, noise variance).

        Raises:
            KernelParamsError: If a transformed value is not a valid hyperparameter
                (for example an overflowed scale)
        """
        theta = np.asarray(theta, dtype=float)
        d = self.n_dims
        with np.errstate(over="ignore"):
            omega = np.exp(theta[:d])
            amplitude = float(np.exp(theta[-2]))
            noise = self.noise_floor + float(np.exp(theta[-1]))
        if self.conditional:
            params: KernelParams = ArcParams(
                omega=omega,
                rho=expit(theta[self.rho_slice]),
                amplitude=amplitude,
                base=self.base,
                alpha=self.alpha,
                embedding=self.embedding,
            )
        else:
            params = PlainParams(omega=omega, amplitude=amplitude, base=self.base, alpha=self.alpha)
        return params, noise

    def pack(self, params: KernelParams, noise_var: float) -> np.ndarray:
        parts = [np.log(params.omega)]
        if self.conditional:
            parts.append(logit(np.clip(params.rho, 1e-12, 1.0 - 1e-12)))
        excess = max(noise_var - self.noise_floor, 1e-300)
        parts.append(np.array([np.log(params.amplitude), np.log(excess)]))
        return np.concatenate(parts)

    def median(self, prior: HyperPrior) -> np.ndarray:
        """Prior median: half arcs and every positive quantity at exp(log_mean)."""
        theta = np.zeros(self.size)
        theta[self.positive_index] = prior.log_mean
        return theta

    def log_prior(self, theta: np.ndarray, prior: HyperPrior) -> float:
        """Prior log-density of the unconstrained vector (Jacobian included)."""
        theta = np.asarray(theta, dtype=float)
        value = prior.log_positive_unconstrained(theta[self.positive_index])
        if self.conditional:
            value += prior.log_extent_unconstrained(theta[self.rho_slice])
        return value

    def sample_prior(self, prior: HyperPrior, rng: np.random.Generator) -> np.ndarray:
        theta = np.empty(self.size)
        theta[self.positive_index] = prior.sample_positive(rng, self.positive_index.size)
        if self.conditional:
            theta[self.rho_slice] = prior.sample_extent(rng, self.n_dims)
        return theta
