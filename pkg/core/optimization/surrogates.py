# core/optimization/surrogates.py
"""GP surrogates that score candidate points by integrated expected improvement."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence

import numpy as np

from config.app_config import config
from config.logging_config import get_module_logger
from core.gp.gp_model import GpModel, Warp
from core.gp.output_transform import OutputTransform
from core.inference.hyper_inference import (
    HyperModel,
    HyperSample,
    fit_samples,
    map_optimize,
    sample_hypers,
)
from core.inference.priors import HyperPrior
from core.kernels.arc_kernel import ArcKernel, ArcParams, Embedding, Kernel, PlainKernel, PlainParams
from core.kernels.base_covariance import BaseCovariance
from core.optimization.acquisition import integrated_ei
from core.space.parameter_space import ParameterSpace, Point

# Create a logger for this module
logger = get_module_logger("surrogates")

FeatureEncoder = Callable[[Sequence[Point]], np.ndarray]


@dataclass
class SurrogateSettings:
    """How a surrogate infers its hyperparameters after each new observation.

    method: "slice" (posterior samples, integrated acquisition) or "map" (single setting)
    refresh_burn_in: burn-in sweeps for chains warm-started from the previous chain's end
    """
    method: str = "slice"
    n_samples: int = config.inference.n_samples
    burn_in: int = config.inference.burn_in
    thin: int = config.inference.thin
    refresh_burn_in: int = 2
    map_restarts: int = 3
    warp: Warp = Warp.IDENTITY

    def __post_init__(self):
        if self.method not in ("slice", "map"):
            raise ValueError(f"Unknown inference method '{self.method}'; expected 'slice' or 'map'")
        self.warp = Warp(self.warp)


class Surrogate(ABC):
    """A GP over encoded points whose hyperparameters are refreshed on every fit."""

    name = "surrogate"

    def __init__(self, settings: Optional[SurrogateSettings] = None, prior: Optional[HyperPrior] = None):
        self.settings = settings or SurrogateSettings()
        self.prior = prior or HyperPrior()
        self.samples: List[HyperSample] = []
        self.models: List[GpModel] = []
        self.incumbent: Optional[float] = None
        self._model: Optional[HyperModel] = None
        self._last_theta: Optional[np.ndarray] = None

    @abstractmethod
    def template_kernel(self) -> Kernel:
        """Kernel carrying the family (base covariance, embedding) to infer hyperparameters for."""

    @abstractmethod
    def encode(self, points: Sequence[Point]) -> Any:
        """Inputs the kernel consumes for these points."""

    def fit(self, points: Sequence[Point], values: np.ndarray, seed: int) -> None:
        """Standardize the observations and refresh the hyperparameters.

        Chains after the first continue from the previous chain's final state.
        """
        transform = OutputTransform.fit(values, self.settings.warp)
        targets = transform.forward(values)
        model = HyperModel(self.template_kernel(), self.encode(points), targets, self.prior)

        if self.settings.method == "map":
            self.samples = [map_optimize(model, self.settings.map_restarts, seed)]
        else:
            warm = self._last_theta is not None and self._last_theta.shape[0] == model.size
            self.samples = sample_hypers(
                model,
                n_samples=self.settings.n_samples,
                burn_in=self.settings.refresh_burn_in if warm else self.settings.burn_in,
                thin=self.settings.thin,
                seed=seed,
                initial_theta=self._last_theta if warm else None,
            )
        self._last_theta = self.samples[-1].theta
        self._model = model
        self.models = fit_samples(model, self.samples)
        self.incumbent = float(np.min(targets))

    def _require_fit(self) -> HyperModel:
        if self._model is None:
            raise RuntimeError(f"{self.name} surrogate must be fitted before scoring")
        return self._model

    def score(self, candidates: Sequence[Point]) -> np.ndarray:
        """Integrated EI of each candidate, in standardized units."""
        model = self._require_fit()
        inputs = self.encode(candidates)
        geometry = model.kernel.geometry(model.inputs, inputs)
        return integrated_ei(self.models, inputs, self.incumbent, geometry)


class ArcSurrogate(Surrogate):
    """Arc-kernel GP directly on conditional points."""

    name = "arc"

    def __init__(
        self,
        space: ParameterSpace,
        base: BaseCovariance = BaseCovariance.MATERN52,
        alpha: Optional[float] = None,
        embedding: Embedding = Embedding.ARC,
        settings: Optional[SurrogateSettings] = None,
        prior: Optional[HyperPrior] = None,
    ):
        super().__init__(settings, prior)
        self.space = space
        params = ArcParams.default(space.n_dims, base, alpha)
        self._kernel = ArcKernel(
            space,
            ArcParams(params.omega, params.rho, base=params.base, alpha=params.alpha, embedding=embedding),
        )

    def template_kernel(self) -> ArcKernel:
        return self._kernel

    def encode(self, points: Sequence[Point]) -> Sequence[Point]:
        return list(points)


class FeatureSurrogate(Surrogate):
    """Plain stationary GP on feature vectors produced by an encoder (e.g. random fill)."""

    name = "features"

    def __init__(
        self,
        encoder: FeatureEncoder,
        n_features: int,
        base: BaseCovariance = BaseCovariance.MATERN52,
        alpha: Optional[float] = None,
        settings: Optional[SurrogateSettings] = None,
        prior: Optional[HyperPrior] = None,
    ):
        super().__init__(settings, prior)
        self.encoder = encoder
        if BaseCovariance.parse(base) == BaseCovariance.RATIONAL_QUADRATIC and alpha is None:
            alpha = 1.0
        self._kernel = PlainKernel(PlainParams(np.ones(n_features), base=base, alpha=alpha))

    def template_kernel(self) -> PlainKernel:
        return self._kernel

    def encode(self, points: Sequence[Point]) -> np.ndarray:
        return self.encoder(points)
