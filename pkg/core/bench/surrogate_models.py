# core/bench/surrogate_models.py
"""Regression models compared by the regression experiment.

Every model predicts in warped space; `transform.to_original` maps predictions back.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.logging_config import get_module_logger
from core.bench.baselines import linear_baseline, random_fill_features, relevant_features
from core.bench.model_registry import surrogate_model
from core.gp.gp_model import apply_warp
from core.gp.output_transform import OutputTransform
from core.inference.hyper_inference import (
    HyperModel,
    HyperSample,
    map_optimize,
    predict_mixture,
    sample_hypers,
)
from core.kernels.arc_kernel import ArcKernel, ArcParams, Kernel, PlainKernel, PlainParams
from core.kernels.base_covariance import BaseCovariance
from core.optimization.surrogates import SurrogateSettings
from core.space.parameter_space import Dimension, ParameterSpace, Point, make_point

# Create a logger for this module
logger = get_module_logger("surrogate_models")

Prediction = Tuple[np.ndarray, np.ndarray]


def _child_seed(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


class GpRegressor:
    """A GP with inferred hyperparameters on standardized warped targets."""

    def __init__(self, kernel: Kernel, settings: SurrogateSettings, seed: int):
        self.kernel = kernel
        self.settings = settings
        self.seed = seed
        self.transform: Optional[OutputTransform] = None
        self.model: Optional[HyperModel] = None
        self.samples: List[HyperSample] = []

    def fit(self, inputs: Any, values: np.ndarray) -> "GpRegressor":
        self.transform = OutputTransform.fit(values, self.settings.warp)
        self.model = HyperModel(self.kernel, inputs, self.transform.forward(values))
        if self.settings.method == "map":
            self.samples = [map_optimize(self.model, self.settings.map_restarts, self.seed)]
        else:
            self.samples = sample_hypers(
                self.model,
                n_samples=self.settings.n_samples,
                burn_in=self.settings.burn_in,
                thin=self.settings.thin,
                seed=self.seed,
            )
        return self

    def predict(self, inputs: Any) -> Prediction:
        mean, var = predict_mixture(self.model, self.samples, inputs)
        return self.transform.to_warped(mean, var)


class ConstantRegressor:
    """Predicts the warped mean of its training values; used where no dimension is relevant."""

    def fit(self, values: np.ndarray, warp) -> "ConstantRegressor":
        self.mean = float(np.mean(apply_warp(values, warp)))
        return self

    def predict(self, inputs: Any) -> Prediction:
        n = len(inputs)
        return np.full(n, self.mean), np.zeros(n)


class RegressionModel(ABC):
    """Fit on (points, raw values); predict warped-space mean and variance."""

    name = "model"

    def __init__(
        self,
        space: ParameterSpace,
        settings: Optional[SurrogateSettings] = None,
        base: BaseCovariance = BaseCovariance.MATERN52,
        alpha: Optional[float] = None,
        fill_seed: int = 0,
        seed: int = 0,
    ):
        self.space = space
        self.settings = settings or SurrogateSettings(method="map")
        self.base = BaseCovariance.parse(base)
        self.alpha = 1.0 if self.base == BaseCovariance.RATIONAL_QUADRATIC and alpha is None else alpha
        self.fill_seed = fill_seed
        self.seed = seed
        self.transform: Optional[OutputTransform] = None

    @abstractmethod
    def fit(self, points: Sequence[Point], values: np.ndarray) -> "RegressionModel":
        ...

    @abstractmethod
    def predict(self, points: Sequence[Point]) -> Prediction:
        ...


@surrogate_model("arc_gp")
class ArcGpModel(RegressionModel):
    """One arc-kernel GP over every depth."""

    name = "arc_gp"

    def fit(self, points, values):
        params = ArcParams.default(self.space.n_dims, self.base, self.alpha)
        self._gp = GpRegressor(ArcKernel(self.space, params), self.settings, self.seed).fit(list(points), values)
        self.transform = self._gp.transform
        return self

    def predict(self, points):
        return self._gp.predict(list(points))


@surrogate_model("plain_gp_random_fill")
class PlainGpRandomFillModel(RegressionModel):
    """Standard GP on depth plus every dimension, irrelevant ones filled randomly."""

    name = "plain_gp_random_fill"

    def _features(self, points: Sequence[Point]) -> np.ndarray:
        return random_fill_features(self.space, points, self.fill_seed)

    def fit(self, points, values):
        params = PlainParams(np.ones(self.space.cube_dimension), base=self.base, alpha=self.alpha)
        self._gp = GpRegressor(PlainKernel(params), self.settings, self.seed).fit(self._features(points), values)
        self.transform = self._gp.transform
        return self

    def predict(self, points):
        return self._gp.predict(self._features(points))


class _SeparateModel(RegressionModel):
    """One independent model per depth; unseen depths predict the training mean."""

    def fit(self, points, values):
        values = np.asarray(values, dtype=float)
        self.transform = OutputTransform.fit(values, self.settings.warp)
        # Warped training mean
        self._fallback = self.transform.shift
        self._models: Dict[int, Any] = {}
        depths = np.array([p.depth for p in points])
        for depth in sorted(set(depths.tolist())):
            rows = np.flatnonzero(depths == depth)
            group = [points[i] for i in rows]
            self._models[depth] = self._fit_depth(depth, group, values[rows])
        return self

    def predict(self, points):
        means = np.full(len(points), self._fallback)
        variances = np.zeros(len(points))
        depths = np.array([p.depth for p in points])
        for depth in sorted(set(depths.tolist())):
            rows = np.flatnonzero(depths == depth)
            model = self._models.get(depth)
            if model is None:
                logger.warning(f"{self.name}: no training data at depth {depth}; predicting the training mean")
                continue
            group = [points[i] for i in rows]
            if not isinstance(model, ConstantRegressor):
                group = self._inputs(depth, group)
            mean, var = model.predict(group)
            means[rows] = mean
            variances[rows] = var
        return means, variances

    def _fit_depth(self, depth: int, points: List[Point], values: np.ndarray) -> Any:
        if not np.any(self.space.mask_for_depth(depth)):
            return ConstantRegressor().fit(values, self.settings.warp)
        kernel = self._kernel(depth)
        return GpRegressor(kernel, self.settings, _child_seed(self.seed, depth)).fit(
            self._inputs(depth, points), values
        )

    @abstractmethod
    def _kernel(self, depth: int) -> Kernel:
        ...

    @abstractmethod
    def _inputs(self, depth: int, points: List[Point]) -> Any:
        ...


def depth_subspace(space: ParameterSpace, depth: int) -> ParameterSpace:
    """The dimensions relevant at `depth`, as an unconditional space."""
    mask = space.mask_for_depth(depth)
    dims = tuple(Dimension(d.name, d.lower, d.upper, 0) for d, m in zip(space.dims, mask) if m)
    return ParameterSpace(max_depth=0, dims=dims)


@surrogate_model("arc_gp_separate")
class ArcGpSeparateModel(_SeparateModel):
    """Arc-kernel GP per depth on that depth's relevant dimensions."""

    name = "arc_gp_separate"

    def _subspace(self, depth: int) -> ParameterSpace:
        if not hasattr(self, "_subspaces"):
            self._subspaces: Dict[int, ParameterSpace] = {}
        if depth not in self._subspaces:
            self._subspaces[depth] = depth_subspace(self.space, depth)
        return self._subspaces[depth]

    def _kernel(self, depth):
        sub = self._subspace(depth)
        return ArcKernel(sub, ArcParams.default(sub.n_dims, self.base, self.alpha))

    def _inputs(self, depth, points):
        sub = self._subspace(depth)
        return [make_point(sub, np.concatenate(([0.0], p.relevant_values()))) for p in points]


@surrogate_model("plain_gp_separate")
class PlainGpSeparateModel(_SeparateModel):
    """Standard GP per depth on that depth's relevant dimensions."""

    name = "plain_gp_separate"

    def _kernel(self, depth):
        n_features = int(np.sum(self.space.mask_for_depth(depth)))
        return PlainKernel(PlainParams(np.ones(n_features), base=self.base, alpha=self.alpha))

    def _inputs(self, depth, points):
        return relevant_features(self.space, points)


@surrogate_model("linear_regression")
class LinearRegressionModel(RegressionModel):
    """Ridge-stabilized least squares on random-fill features, fitted to warped targets."""

    name = "linear_regression"

    def fit(self, points, values):
        self.transform = OutputTransform.fit(values, self.settings.warp)
        self._points = list(points)
        self._warped = apply_warp(values, self.settings.warp)
        return self

    def predict(self, points):
        mean = linear_baseline(self.space, self._points, self._warped, list(points), self.fill_seed)
        return mean, np.zeros(len(points))
