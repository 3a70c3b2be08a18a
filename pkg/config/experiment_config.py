# config/experiment_config.py
"""Validated JSON configurations for the command-line experiments.

Every file the CLI reads is parsed into one of the pydantic models below; a
ValidationError or ConfigError means a usage/config problem (exit status 2).
"""

import json
from typing import Any, Dict, List, Literal, Optional, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from config.app_config import config
from config.logging_config import get_module_logger
from utils.error_handling import ConfigError

# Create a logger for this module
logger = get_module_logger("experiment_config")

ModelT = TypeVar("ModelT", bound=BaseModel)

ModelName = Literal[
    "arc_gp", "arc_gp_separate", "plain_gp_random_fill", "plain_gp_separate", "linear_regression"
]
ArmName = Literal["arc_gp", "random_fill", "random_search"]
BaseName = Literal["expquad", "rq", "matern52"]
WarpName = Literal["identity", "log"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class InferenceSettings(_Strict):
    """Hyperparameter inference for every GP in an experiment."""
    method: Literal["slice", "map"] = "map"
    n_samples: int = Field(config.inference.n_samples, ge=1)
    burn_in: int = Field(config.inference.burn_in, ge=0)
    thin: int = Field(config.inference.thin, ge=1)
    refresh_burn_in: int = Field(2, ge=0)
    map_restarts: int = Field(3, ge=1)


class ArcParamsConfig(_Strict):
    """Arc-kernel hyperparameters; omitted vectors default to ω = 1 and ρ = 1/2."""
    omega: Optional[List[float]] = None
    rho: Optional[List[float]] = None
    amplitude: float = Field(1.0, gt=0)
    base: BaseName = "matern52"
    alpha: Optional[float] = Field(None, gt=0)
    embedding: Literal["arc", "box"] = "arc"

    @field_validator("omega")
    @classmethod
    def _positive_omega(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(not w > 0 for w in value):
            raise ValueError("every omega must be > 0")
        return value

    @field_validator("rho")
    @classmethod
    def _unit_rho(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(not 0.0 <= r <= 1.0 for r in value):
            raise ValueError("every rho must lie in [0, 1]")
        return value

    @model_validator(mode="after")
    def _rq_alpha(self) -> "ArcParamsConfig":
        if self.base == "rq" and self.alpha is None:
            self.alpha = 1.0
        return self


class DimensionConfig(_Strict):
    name: str = Field(..., min_length=1)
    lower: float
    upper: float
    layer: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _ordered(self) -> "DimensionConfig":
        if not self.lower < self.upper:
            raise ValueError(f"dimension '{self.name}' needs lower < upper")
        return self


class DepthConfig(_Strict):
    max: int = Field(..., ge=0)
    name: str = "depth"


class SpaceConfig(_Strict):
    """A conditional space in the layout `ParameterSpace.from_dict` reads."""
    depth: DepthConfig
    dims: List[DimensionConfig] = Field(..., min_length=1)


class KernelCheckConfig(_Strict):
    """Settings of `check-kernel`. Without a space, the synthetic objective's space is used."""
    space: Optional[SpaceConfig] = None
    params: Optional[ArcParamsConfig] = None
    seed: int = Field(0, ge=0)
    n_param_draws: int = Field(10, ge=1)
    n_points: int = Field(100, ge=3)
    n_gram_draws: int = Field(50, ge=1)
    gram_size: int = Field(30, ge=1)
    embeddings: List[Literal["arc", "box"]] = Field(default_factory=lambda: ["arc", "box"], min_length=1)


class ObjectiveSettings(_Strict):
    path: Optional[str] = None
    noise_sd: Optional[float] = Field(None, ge=0)


class RegressionExperimentConfig(_Strict):
    """Cross-validated comparison of regression models on the synthetic dataset."""
    models: List[ModelName] = Field(
        default_factory=lambda: [
            "arc_gp", "arc_gp_separate", "plain_gp_random_fill", "plain_gp_separate", "linear_regression"
        ],
        min_length=1,
    )
    warp: WarpName = "identity"
    folds: int = Field(10, ge=2)
    seeds: List[int] = Field(default_factory=lambda: [0], min_length=1)
    n_points: int = Field(300, ge=4)
    base: BaseName = "matern52"
    alpha: Optional[float] = Field(None, gt=0)
    objective: ObjectiveSettings = Field(default_factory=ObjectiveSettings)
    inference: InferenceSettings = Field(default_factory=InferenceSettings)
    max_workers: int = Field(config.bench.max_workers, ge=1)

    @model_validator(mode="after")
    def _enough_points(self) -> "RegressionExperimentConfig":
        if self.n_points < self.folds:
            raise ValueError(f"n_points ({self.n_points}) must be >= folds ({self.folds})")
        return self


class BoExperimentConfig(_Strict):
    """Repeated optimization runs of several arms on the synthetic objective."""
    arms: List[ArmName] = Field(
        default_factory=lambda: ["arc_gp", "random_fill", "random_search"], min_length=1
    )
    seeds: List[int] = Field(default_factory=lambda: list(range(10)), min_length=1)
    budget: int = Field(50, ge=10)
    init_count: int = Field(config.optimization.init_count, ge=1)
    grid_size: int = Field(config.optimization.grid_size, ge=1)
    scramble_seed: Optional[int] = Field(None, ge=0)
    warp: WarpName = "identity"
    base: BaseName = "matern52"
    alpha: Optional[float] = Field(None, gt=0)
    deep_depth: int = Field(3, ge=0)
    objective: ObjectiveSettings = Field(default_factory=ObjectiveSettings)
    inference: InferenceSettings = Field(
        default_factory=lambda: InferenceSettings(method="slice", n_samples=3, burn_in=10, thin=1, refresh_burn_in=1)
    )
    max_workers: int = Field(config.bench.max_workers, ge=1)

    @model_validator(mode="after")
    def _budget_covers_design(self) -> "BoExperimentConfig":
        if self.budget < self.init_count:
            raise ValueError(f"budget ({self.budget}) must be >= init_count ({self.init_count})")
        return self


class SobolDumpConfig(_Strict):
    # Defaults match the bundled sobol_dump.json
    dimension: int = Field(24, ge=1)
    count: int = Field(2000, ge=1)
    scramble_seed: Optional[int] = Field(None, ge=0)


def load_config(json_path: Optional[str], model_class: Type[ModelT], overrides: Optional[Dict[str, Any]] = None) -> ModelT:
    """Read and validate a JSON config.

    Args:
        json_path: Path to a JSON object, or None for the model's defaults
        model_class: Pydantic model to validate against
        overrides: Top-level fields replacing those in the file (e.g. a CLI seed)

    Returns:
        Validated config

    Raises:
        ConfigError: If the file cannot be read, is not a JSON object, or fails validation
    """
    data: Dict[str, Any] = {}
    if json_path is not None:
        try:
            with open(json_path, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read config {json_path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Config {json_path} must contain a JSON object")
    data.update(overrides or {})
    try:
        parsed = model_class.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid {model_class.__name__}: {e}") from e
    logger.debug(f"Loaded {model_class.__name__} from {json_path or 'defaults'}")
    return parsed
