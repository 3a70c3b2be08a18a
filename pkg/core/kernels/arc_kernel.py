# core/kernels/arc_kernel.py
"""The arc kernel for conditional spaces and the plain stationary kernel used by baselines.

Each dimension i is embedded into the plane: irrelevant values map to [0, 0], relevant
values map onto an arc of radius ω_i (or, for the box embedding, onto a segment at
distance ω_i). A base covariance is then applied to the Euclidean distance in the
resulting 2D-dimensional space.
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from config.logging_config import get_module_logger
from core.kernels.base_covariance import BaseCovariance, base_kappa
from core.space.parameter_space import (
    DimensionMismatchError,
    ParameterSpace,
    Point,
    normalize,
    points_to_arrays,
)
from utils.error_handling import ConditionalBOError
from utils.validation import as_float_vector, require_in_range, require_positive

logger = get_module_logger("arc_kernel")


class KernelParamsError(ConditionalBOError, ValueError):
    """Exception raised for invalid kernel hyperparameters."""
    pass


class Embedding(str, Enum):
    """How relevant values of a dimension are placed in the plane."""
    ARC = "arc"
    BOX = "box"


def _validate_base(base: BaseCovariance, alpha: Optional[float], amplitude: float) -> None:
    require_positive(np.array([amplitude]), "amplitude", KernelParamsError)
    if base == BaseCovariance.RATIONAL_QUADRATIC:
        if alpha is None:
            raise KernelParamsError("alpha is required for the rational quadratic covariance")
        require_positive(np.array([alpha]), "alpha", KernelParamsError)


@dataclass(frozen=True, eq=False)
class PlainParams:
    """Hyperparameters of the plain stationary kernel: per-dimension ω, σ², base covariance."""
    omega: np.ndarray
    amplitude: float = 1.0
    base: BaseCovariance = BaseCovariance.MATERN52
    alpha: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "omega", as_float_vector(self.omega, "omega"))
        object.__setattr__(self, "base", BaseCovariance.parse(self.base))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        require_positive(self.omega, "omega", KernelParamsError)
        _validate_base(self.base, self.alpha, self.amplitude)

    @property
    def n_dims(self) -> int:
        return self.omega.shape[0]

    def to_dict(self) -> Dict[str, Any]:
        config_dict = {
            "omega": self.omega.tolist(),
            "amplitude": self.amplitude,
            "base": self.base.value,
        }
        if self.alpha is not None:
            config_dict["alpha"] = self.alpha
        return config_dict

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "PlainParams":
        return cls(
            omega=config_dict["omega"],
            amplitude=config_dict.get("amplitude", 1.0),
            base=config_dict.get("base", BaseCovariance.MATERN52.value),
            alpha=config_dict.get("alpha"),
        )


@dataclass(frozen=True, eq=False)
class ArcParams:
    """Arc-kernel hyperparameters.

    omega: per-dimension scales ω_i > 0
    rho: per-dimension angular extents ρ_i in [0, 1]; ρ_i = 0 collapses dimension i
    amplitude: signal variance σ²
    base: base covariance applied to the embedded distance
    alpha: rational-quadratic shape, required iff base is "rq"
    embedding: "arc" (default) or "box"
    """
    omega: np.ndarray
    rho: np.ndarray
    amplitude: float = 1.0
    base: BaseCovariance = BaseCovariance.MATERN52
    alpha: Optional[float] = None
    embedding: Embedding = Embedding.ARC

    def __post_init__(self):
        object.__setattr__(self, "omega", as_float_vector(self.omega, "omega"))
        object.__setattr__(self, "rho", as_float_vector(self.rho, "rho"))
        object.__setattr__(self, "base", BaseCovariance.parse(self.base))
        object.__setattr__(self, "embedding", Embedding(self.embedding))
        object.__setattr__(self, "amplitude", float(self.amplitude))

        if self.omega.shape != self.rho.shape:
            raise KernelParamsError(
                f"omega and rho lengths differ: {self.omega.shape[0]} vs {self.rho.shape[0]}"
            )
        require_positive(self.omega, "omega", KernelParamsError)
        require_in_range(self.rho, "rho", 0.0, 1.0, KernelParamsError)
        _validate_base(self.base, self.alpha, self.amplitude)

    @property
    def n_dims(self) -> int:
        return self.omega.shape[0]

    @classmethod
    def default(
        cls,
        n_dims: int,
        base: Union[str, BaseCovariance] = BaseCovariance.MATERN52,
        alpha: Optional[float] = None,
    ) -> "ArcParams":
        """Unit scales, half arcs, unit amplitude."""
        if BaseCovariance.parse(base) == BaseCovariance.RATIONAL_QUADRATIC and alpha is None:
            alpha = 1.0
        return cls(omega=np.ones(n_dims), rho=np.full(n_dims, 0.5), base=base, alpha=alpha)

    def to_dict(self) -> Dict[str, Any]:
        config_dict = {
            "omega": self.omega.tolist(),
            "rho": self.rho.tolist(),
            "amplitude": self.amplitude,
            "base": self.base.value,
            "embedding": self.embedding.value,
        }
        if self.alpha is not None:
            config_dict["alpha"] = self.alpha
        return config_dict

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "ArcParams":
        """Create params from {"omega", "rho", "amplitude", "base", "alpha"?, "embedding"?}."""
        try:
            return cls(
                omega=config_dict["omega"],
                rho=config_dict["rho"],
                amplitude=config_dict.get("amplitude", 1.0),
                base=config_dict.get("base", BaseCovariance.MATERN52.value),
                alpha=config_dict.get("alpha"),
                embedding=config_dict.get("embedding", Embedding.ARC.value),
            )
        except KeyError as e:
            raise KernelParamsError(f"Kernel parameters missing field {e}") from e

    @classmethod
    def from_json(cls, json_path: str) -> "ArcParams":
        with open(json_path, "r") as f:
            return cls.from_dict(json.load(f))

    def to_json(self, json_path: str) -> None:
        with open(json_path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)


@dataclass(frozen=True)
class ArcGeometry:
    """Hyperparameter-independent pair data for n×m point pairs, arrays shaped (D, n, m)."""
    diff: np.ndarray
    both_relevant: np.ndarray
    mismatch: np.ndarray
    # Relevant side's normalized value minus 1/2 on mismatched cells; box embedding only
    offset: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PlainGeometry:
    """Coordinate differences for n×m vector pairs, shaped (m_dims, n, m)."""
    diff: np.ndarray


class Kernel(ABC):
    """Covariance function with cacheable, hyperparameter-independent pair geometry."""

    @property
    @abstractmethod
    def params(self) -> Union[ArcParams, PlainParams]:
        ...

    @property
    def amplitude(self) -> float:
        return self.params.amplitude

    @abstractmethod
    def geometry(self, inputs_a, inputs_b):
        """Precompute the pair data between two input collections."""

    @abstractmethod
    def distance(self, geometry) -> np.ndarray:
        """Pairwise distances for precomputed geometry."""

    @abstractmethod
    def with_params(self, params) -> "Kernel":
        """Same kernel family with new hyperparameters."""

    @abstractmethod
    def n_inputs(self, inputs) -> int:
        ...

    def covariance(self, geometry) -> np.ndarray:
        params = self.params
        return base_kappa(params.base, self.distance(geometry), params.amplitude, params.alpha)

    def gram(self, inputs) -> np.ndarray:
        return self.covariance(self.geometry(inputs, inputs))

    def cross(self, inputs_a, inputs_b) -> np.ndarray:
        return self.covariance(self.geometry(inputs_a, inputs_b))

    def prior_variance(self, inputs) -> np.ndarray:
        return np.full(self.n_inputs(inputs), self.amplitude)


class ArcKernel(Kernel):
    """Arc kernel over Points of a conditional space."""

    def __init__(self, space: ParameterSpace, params: ArcParams):
        if params.n_dims != space.n_dims:
            raise DimensionMismatchError(
                f"Kernel has {params.n_dims} dimensions, space has {space.n_dims}"
            )
        self.space = space
        self._params = params

    @property
    def params(self) -> ArcParams:
        return self._params

    def with_params(self, params: ArcParams) -> "ArcKernel":
        return ArcKernel(self.space, params)

    def n_inputs(self, inputs: Sequence[Point]) -> int:
        return len(inputs)

    def geometry(self, inputs_a: Sequence[Point], inputs_b: Sequence[Point]) -> ArcGeometry:
        _, unit_a, mask_a = points_to_arrays(self.space, inputs_a)
        _, unit_b, mask_b = points_to_arrays(self.space, inputs_b)
        ua, ub = unit_a.T[:, :, None], unit_b.T[:, None, :]
        ma, mb = mask_a.T[:, :, None], mask_b.T[:, None, :]

        offset = None
        if self._params.embedding == Embedding.BOX:
            offset = np.where(ma, ua, ub) - 0.5
        return ArcGeometry(diff=ua - ub, both_relevant=ma & mb, mismatch=ma ^ mb, offset=offset)

    def distance(self, geometry: ArcGeometry) -> np.ndarray:
        omega = self._params.omega[:, None, None]
        rho = self._params.rho[:, None, None]

        if self._params.embedding == Embedding.ARC:
            # ω√2·√(1 − cos θ) written as 2ω|sin(θ/2)|, which keeps precision for small θ
            same = 2.0 * omega * np.abs(np.sin(0.5 * np.pi * rho * geometry.diff))
            switched = np.broadcast_to(omega, geometry.diff.shape)
        else:
            if geometry.offset is None:
                raise KernelParamsError("Geometry was built without box-embedding offsets")
            same = 2.0 * omega * rho * np.abs(geometry.diff)
            switched = omega * np.sqrt(1.0 + (2.0 * rho * geometry.offset) ** 2)

        per_dim = np.where(geometry.both_relevant, same, np.where(geometry.mismatch, switched, 0.0))

        # Accumulate in a fixed order so results do not depend on the batch shape
        sq = np.zeros(per_dim.shape[1:])
        for d_i in per_dim:
            sq += d_i * d_i
        return np.sqrt(sq)


class PlainKernel(Kernel):
    """Stationary kernel on plain feature vectors with per-dimension scales ω_i."""

    def __init__(self, params: PlainParams):
        self._params = params

    @property
    def params(self) -> PlainParams:
        return self._params

    def with_params(self, params: PlainParams) -> "PlainKernel":
        return PlainKernel(params)

    def n_inputs(self, inputs: np.ndarray) -> int:
        return np.asarray(inputs).shape[0]

    def geometry(self, inputs_a: np.ndarray, inputs_b: np.ndarray) -> PlainGeometry:
        a = np.atleast_2d(np.asarray(inputs_a, dtype=float))
        b = np.atleast_2d(np.asarray(inputs_b, dtype=float))
        for name, x in (("inputs_a", a), ("inputs_b", b)):
            if x.shape[1] != self._params.n_dims:
                raise DimensionMismatchError(
                    f"{name} has {x.shape[1]} columns, kernel has {self._params.n_dims} dimensions"
                )
        return PlainGeometry(diff=a.T[:, :, None] - b.T[:, None, :])

    def distance(self, geometry: PlainGeometry) -> np.ndarray:
        scaled = self._params.omega[:, None, None] * geometry.diff
        sq = np.zeros(scaled.shape[1:])
        for d_i in scaled:
            sq += d_i * d_i
        return np.sqrt(sq)


def embed(space: ParameterSpace, params: ArcParams, point: Point) -> np.ndarray:
    """Embed a point into R^{2D}: coordinates 2i, 2i+1 hold dimension i's pair.

    Raises:
        DimensionMismatchError: If params or point do not match the space
    """
    if params.n_dims != space.n_dims or point.values.shape[0] != space.n_dims:
        raise DimensionMismatchError(
            f"Expected {space.n_dims} dimensions, got params={params.n_dims}, "
            f"point={point.values.shape[0]}"
        )
    unit = normalize(space, point)
    if params.embedding == Embedding.ARC:
        angle = np.pi * params.rho * unit
        pairs = np.stack([np.sin(angle), np.cos(angle)], axis=1)
    else:
        pairs = np.stack([2.0 * params.rho * (unit - 0.5), np.ones_like(unit)], axis=1)
    pairs = params.omega[:, None] * pairs
    pairs[~point.mask] = 0.0
    return pairs.ravel()


def arc_distance(space: ParameterSpace, params: ArcParams, p: Point, q: Point) -> float:
    """Closed-form pseudo-metric between two points (Euclidean distance of their embeddings)."""
    kernel = ArcKernel(space, params)
    return float(kernel.distance(kernel.geometry([p], [q]))[0, 0])


def arc_kernel(space: ParameterSpace, params: ArcParams, p: Point, q: Point) -> float:
    """k(p, q) = κ(arc_distance(p, q))."""
    return float(ArcKernel(space, params).cross([p], [q])[0, 0])


def plain_kernel(params: PlainParams, v: np.ndarray, w: np.ndarray) -> float:
    """κ applied to the ω-weighted Euclidean distance between two plain vectors."""
    return float(PlainKernel(params).cross(np.atleast_2d(v), np.atleast_2d(w))[0, 0])


def gram(space: ParameterSpace, params: ArcParams, points: Sequence[Point]) -> np.ndarray:
    """n×n arc-kernel Gram matrix; an empty list gives a 0×0 matrix."""
    if len(points) == 0:
        return np.zeros((0, 0))
    return ArcKernel(space, params).gram(points)
