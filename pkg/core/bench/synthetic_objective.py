# core/bench/synthetic_objective.py
"""A conditional test objective shaped like a neural-network architecture search.

f(x) = base − depth_bonus[depth] + Σ_{relevant i} w_i (x̃_i − opt_i)² + noise,
clipped to [1e-6, 1] so the log warp always applies. Coefficients live in a versioned
JSON asset.
"""

import json
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.app_config import config
from config.logging_config import get_module_logger
from core.optimization.bo_loop import decode
from core.space.parameter_space import (
    Dimension,
    ParameterSpace,
    Point,
    make_point,
    normalize,
    point_rng,
)
from utils.error_handling import ConditionalBOError
from utils.validation import as_float_vector

# Create a logger for this module
logger = get_module_logger("synthetic_objective")

OUTPUT_FLOOR = 1e-6
OUTPUT_CEILING = 1.0

# Stream salts: objective noise and dataset sampling must not share draws
NOISE_SALT = 1
DATASET_SALT = 2


class ObjectiveDefinitionError(ConditionalBOError, ValueError):
    """Exception raised for an inconsistent objective definition."""
    pass


@dataclass(frozen=True, eq=False)
class SyntheticObjective:
    """Synthetic conditional objective (minimization).

    optima and weights are per dimension, in normalized coordinates; depth_bonus has
    one entry per depth 0..L.
    """
    space: ParameterSpace
    optima: np.ndarray
    weights: np.ndarray
    depth_bonus: np.ndarray
    base_value: float = 0.5
    noise_sd: float = 0.0
    seed: int = 0
    version: int = 1

    def __post_init__(self):
        object.__setattr__(self, "optima", as_float_vector(self.optima, "optima"))
        object.__setattr__(self, "weights", as_float_vector(self.weights, "weights"))
        object.__setattr__(self, "depth_bonus", as_float_vector(self.depth_bonus, "depth_bonus"))
        d = self.space.n_dims
        if self.optima.shape[0] != d or self.weights.shape[0] != d:
            raise ObjectiveDefinitionError(
                f"Need {d} optima and weights, got {self.optima.shape[0]} and {self.weights.shape[0]}"
            )
        if self.depth_bonus.shape[0] != self.space.max_depth + 1:
            raise ObjectiveDefinitionError(
                f"Need {self.space.max_depth + 1} depth bonuses, got {self.depth_bonus.shape[0]}"
            )
        if np.any(self.weights < 0) or not self.noise_sd >= 0:
            raise ObjectiveDefinitionError("Weights and noise_sd must be nonnegative")

    @classmethod
    def from_dict(
        cls, config_dict: Dict[str, Any], seed: int = 0, noise_sd: Optional[float] = None
    ) -> "SyntheticObjective":
        """Build from the asset layout: global dims, per-layer dims, optima, weights, bonuses."""
        try:
            max_depth = int(config_dict["max_depth"])
            global_dims = config_dict["global_dims"]
            layer_dims = config_dict["layer_dims"]
            layer_optima = config_dict["layer_optima"]
            layer_weights = config_dict["layer_weights"]

            dims: List[Dimension] = []
            optima: List[float] = []
            weights: List[float] = []
            for entry in global_dims:
                dims.append(Dimension(entry["name"], float(entry["lower"]), float(entry["upper"]), 0))
                optima.append(float(entry["optimum"]))
                weights.append(float(entry["weight"]))
            for k in range(1, max_depth + 1):
                for j, entry in enumerate(layer_dims):
                    dims.append(
                        Dimension(f"{entry['name']}_{k}", float(entry["lower"]), float(entry["upper"]), k)
                    )
                    optima.append(float(layer_optima[k - 1][j]))
                    weights.append(float(layer_weights[k - 1][j]))
        except (KeyError, IndexError, TypeError) as e:
            raise ObjectiveDefinitionError(f"Invalid objective definition: {e}") from e

        return cls(
            space=ParameterSpace(max_depth=max_depth, dims=tuple(dims)),
            optima=optima,
            weights=weights,
            depth_bonus=config_dict["depth_bonus"],
            base_value=float(config_dict.get("base_value", 0.5)),
            noise_sd=float(config_dict.get("noise_sd", 0.0) if noise_sd is None else noise_sd),
            seed=seed,
            version=int(config_dict.get("version", 1)),
        )

    @classmethod
    def from_json(
        cls, json_path: Optional[str] = None, seed: int = 0, noise_sd: Optional[float] = None
    ) -> "SyntheticObjective":
        json_path = json_path or config.bench.objective_asset
        with open(json_path, "r") as f:
            objective = cls.from_dict(json.load(f), seed=seed, noise_sd=noise_sd)
        logger.debug(f"Loaded objective v{objective.version} from {json_path} (D={objective.space.n_dims})")
        return objective

    def __call__(self, point: Point) -> float:
        return eval_synthetic(self, point)

    def optimum_point(self) -> Point:
        """The noiseless global minimizer: maximum depth, every dimension at its optimum."""
        values = self.space.lower + self.optima * self.space.widths
        return make_point(self.space, np.concatenate(([float(self.space.max_depth)], values)))

    def minimum(self) -> float:
        best = self.base_value - float(np.max(self.depth_bonus))
        return float(np.clip(best, OUTPUT_FLOOR, OUTPUT_CEILING))


def eval_synthetic(objective: SyntheticObjective, point: Point) -> float:
    """Evaluate the objective; only relevant coordinates are read.

    Noise is a deterministic function of (objective seed, point), so re-evaluating a
    point (or a conditionally equal one) returns the same value.
    """
    unit = normalize(objective.space, point)
    bowl = np.where(point.mask, objective.weights * (unit - objective.optima) ** 2, 0.0)
    value = objective.base_value - objective.depth_bonus[point.depth] + float(np.sum(bowl))
    if objective.noise_sd > 0:
        value += objective.noise_sd * point_rng(point, objective.seed, NOISE_SALT).standard_normal()
    return float(np.clip(value, OUTPUT_FLOOR, OUTPUT_CEILING))


def generate_dataset(
    objective: SyntheticObjective, n: int, seed: int
) -> Tuple[List[Point], np.ndarray]:
    """Regression dataset: n uniform unit-cube draws decoded into points, with their values."""
    rng = np.random.default_rng([seed, DATASET_SALT])
    unit = rng.uniform(size=(n, objective.space.cube_dimension))
    points = [decode(objective.space, u) for u in unit]
    values = np.array([objective(p) for p in points])
    logger.info(f"Generated dataset of {n} points (seed={seed})")
    return points, values
