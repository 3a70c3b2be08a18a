# core/space/parameter_space.py
"""Conditional parameter spaces, points in them, and the depth-threshold relevance rule.

A raw coordinate vector has the layout ``[depth, x_1, ..., x_D]``. The depth is an
integer-valued coordinate in ``[0, L]`` that is always relevant; dimension ``i`` is
relevant iff ``depth >= layer(i)``.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.logging_config import get_module_logger
from utils.error_handling import ConditionalBOError

logger = get_module_logger("parameter_space")


class SpaceDefinitionError(ConditionalBOError, ValueError):
    """Exception raised for an invalid space or dimension definition."""
    pass


class DimensionMismatchError(ConditionalBOError, ValueError):
    """Exception raised when a vector does not match the space's dimensionality."""
    pass


class DepthOutOfRangeError(ConditionalBOError, ValueError):
    """Exception raised when the depth coordinate rounds outside [0, L]."""
    pass


class BoundViolationError(ConditionalBOError, ValueError):
    """Exception raised when a relevant coordinate lies outside its bounds."""
    pass


@dataclass(frozen=True)
class Dimension:
    """A bounded real dimension, relevant from `layer` onward."""
    name: str
    lower: float
    upper: float
    layer: int = 0

    def __post_init__(self):
        if not self.name:
            raise SpaceDefinitionError("Dimension name must be non-empty")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise SpaceDefinitionError(f"Dimension '{self.name}' has non-finite bounds")
        if not self.lower < self.upper:
            raise SpaceDefinitionError(
                f"Dimension '{self.name}' needs lower < upper, got [{self.lower}, {self.upper}]"
            )
        if int(self.layer) != self.layer or self.layer < 0:
            raise SpaceDefinitionError(
                f"Dimension '{self.name}' layer must be a nonnegative integer, got {self.layer}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "Dimension":
        try:
            return cls(
                name=str(config_dict["name"]),
                lower=float(config_dict["lower"]),
                upper=float(config_dict["upper"]),
                layer=int(config_dict.get("layer", 0)),
            )
        except KeyError as e:
            raise SpaceDefinitionError(f"Dimension definition is missing field {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "lower": self.lower, "upper": self.upper, "layer": self.layer}


@dataclass(frozen=True)
class ParameterSpace:
    """A conditional space: a depth coordinate in [0, max_depth] plus D layered dimensions.

    Every layer 1..max_depth must own at least one dimension so that a point's
    relevance mask determines its depth. Layer 0 (always relevant) may be empty.
    """
    max_depth: int
    dims: Tuple[Dimension, ...]
    depth_name: str = "depth"

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))

        if int(self.max_depth) != self.max_depth or self.max_depth < 0:
            raise SpaceDefinitionError(f"max_depth must be a nonnegative integer, got {self.max_depth}")
        if not self.dims:
            raise SpaceDefinitionError("A parameter space needs at least one dimension")

        names = [d.name for d in self.dims]
        if len(set(names)) != len(names) or self.depth_name in names:
            raise SpaceDefinitionError(f"Dimension names must be unique, got {names}")

        layers = {d.layer for d in self.dims}
        if max(layers) > self.max_depth:
            raise SpaceDefinitionError(
                f"Dimension layer {max(layers)} exceeds max depth {self.max_depth}"
            )
        missing = [k for k in range(1, self.max_depth + 1) if k not in layers]
        if missing:
            raise SpaceDefinitionError(f"Layers {missing} have no dimensions; layers must be contiguous")

    @property
    def n_dims(self) -> int:
        """Number of non-depth dimensions (D)."""
        return len(self.dims)

    @property
    def cube_dimension(self) -> int:
        """Dimension of the unit cube the space is searched over (D + 1)."""
        return len(self.dims) + 1

    @cached_property
    def layers(self) -> np.ndarray:
        return _frozen(np.array([d.layer for d in self.dims], dtype=int))

    @cached_property
    def lower(self) -> np.ndarray:
        return _frozen(np.array([d.lower for d in self.dims], dtype=float))

    @cached_property
    def upper(self) -> np.ndarray:
        return _frozen(np.array([d.upper for d in self.dims], dtype=float))

    @cached_property
    def widths(self) -> np.ndarray:
        return _frozen(self.upper - self.lower)

    def mask_for_depth(self, depth: int) -> np.ndarray:
        """Relevance mask of the D dimensions at an integer depth."""
        return _frozen(self.layers <= depth)

    @classmethod
    def layered(
        cls,
        max_depth: int,
        global_dims: Sequence[Tuple[str, float, float]],
        layer_dims: Sequence[Tuple[str, float, float]],
    ) -> "ParameterSpace":
        """Build the architecture-style space: global dims plus one block per layer.

        Args:
            max_depth: Number of layers L
            global_dims: (name, lower, upper) triples relevant at every depth
            layer_dims: (name, lower, upper) triples repeated for layers 1..L as `name_k`

        Returns:
            ParameterSpace instance
        """
        dims: List[Dimension] = [Dimension(n, lo, hi, 0) for n, lo, hi in global_dims]
        for k in range(1, max_depth + 1):
            dims.extend(Dimension(f"{n}_{k}", lo, hi, k) for n, lo, hi in layer_dims)
        return cls(max_depth=max_depth, dims=tuple(dims))

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> "ParameterSpace":
        """Create a space from {"depth": {"max": L}, "dims": [{"name","lower","upper","layer"}]}."""
        try:
            depth = config_dict["depth"]
            max_depth = int(depth["max"])
            dims = [Dimension.from_dict(d) for d in config_dict["dims"]]
        except (KeyError, TypeError) as e:
            raise SpaceDefinitionError(f"Invalid space definition: {e}") from e
        return cls(
            max_depth=max_depth,
            dims=tuple(dims),
            depth_name=str(depth.get("name", "depth")),
        )

    @classmethod
    def from_json(cls, json_path: str) -> "ParameterSpace":
        with open(json_path, "r") as f:
            space = cls.from_dict(json.load(f))
        logger.debug(f"Loaded space from {json_path}: D={space.n_dims}, L={space.max_depth}")
        return space

    def to_dict(self) -> Dict[str, Any]:
        return {
            "depth": {"max": self.max_depth, "name": self.depth_name},
            "dims": [d.to_dict() for d in self.dims],
        }


@dataclass(frozen=True, eq=False)
class Point:
    """A point in a conditional space.

    Values at masked-out positions are stored but carry no meaning; equality and
    hashing use conditional equality (same depth, same relevant values).
    """
    depth: int
    values: np.ndarray
    mask: np.ndarray = field(repr=False)

    def key(self) -> Tuple[Any, ...]:
        """Conditional-equality key: depth plus relevant values (None where irrelevant)."""
        return (self.depth,) + tuple(
            float(v) if m else None for v, m in zip(self.values, self.mask)
        )

    def conditionally_equal(self, other: "Point") -> bool:
        return self.key() == other.key()

    def relevant_values(self) -> np.ndarray:
        return self.values[self.mask]

    def raw(self) -> np.ndarray:
        """The raw coordinate vector [depth, x_1, ..., x_D]."""
        return np.concatenate(([float(self.depth)], self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Point):
            return NotImplemented
        return self.conditionally_equal(other)

    def __hash__(self) -> int:
        return hash(self.key())


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _split_raw(space: ParameterSpace, raw: Iterable[float]) -> Tuple[int, np.ndarray]:
    raw = np.asarray(raw, dtype=float).ravel()
    if raw.shape[0] != space.cube_dimension:
        raise DimensionMismatchError(
            f"Raw vector has length {raw.shape[0]}, expected {space.cube_dimension} "
            f"(depth followed by {space.n_dims} dimensions)"
        )
    if not math.isfinite(raw[0]):
        raise DepthOutOfRangeError(f"Depth coordinate is not finite: {raw[0]}")

    # Round half-up
    depth = int(math.floor(raw[0] + 0.5))
    if depth < 0 or depth > space.max_depth:
        raise DepthOutOfRangeError(
            f"Depth {raw[0]} rounds to {depth}, outside [0, {space.max_depth}]"
        )
    return depth, raw[1:]


def relevance(space: ParameterSpace, raw: Iterable[float]) -> np.ndarray:
    """Compute the relevance mask δ(x) of a raw coordinate vector.

    Args:
        space: Parameter space
        raw: Vector [depth, x_1, ..., x_D]

    Returns:
        Boolean mask of length D; mask[i] is true iff round(depth) >= layer(i)

    Raises:
        DimensionMismatchError: If raw has the wrong length
        DepthOutOfRangeError: If the depth rounds outside [0, L]
    """
    depth, _ = _split_raw(space, raw)
    return space.mask_for_depth(depth)


def make_point(space: ParameterSpace, raw: Iterable[float]) -> Point:
    """Create a validated Point from a raw coordinate vector.

    Relevant coordinates are bound-checked; irrelevant coordinates are stored as given.

    Args:
        space: Parameter space
        raw: Vector [depth, x_1, ..., x_D]

    Returns:
        Point with its derived mask

    Raises:
        DimensionMismatchError: If raw has the wrong length
        DepthOutOfRangeError: If the depth rounds outside [0, L]
        BoundViolationError: If a relevant coordinate lies outside [lower, upper]
    """
    depth, values = _split_raw(space, raw)
    mask = space.mask_for_depth(depth)

    relevant = values[mask]
    outside = ~np.isfinite(relevant) | (relevant < space.lower[mask]) | (relevant > space.upper[mask])
    if np.any(outside):
        names = [d.name for d, m in zip(space.dims, mask) if m]
        bad = [names[i] for i in np.flatnonzero(outside)]
        raise BoundViolationError(f"Relevant coordinates out of bounds: {bad}")

    return Point(depth=depth, values=_frozen(values.copy()), mask=mask)


def normalize(space: ParameterSpace, point: Point) -> np.ndarray:
    """Map relevant coordinates to (x_i - l_i) / (u_i - l_i); irrelevant ones to 0."""
    unit = (point.values - space.lower) / space.widths
    return np.where(point.mask, unit, 0.0)


def denormalize(space: ParameterSpace, unit_values: Iterable[float]) -> np.ndarray:
    """Map unit coordinates back to raw values, the inverse of `normalize` on relevant dims."""
    unit_values = np.asarray(unit_values, dtype=float)
    if unit_values.shape[-1] != space.n_dims:
        raise DimensionMismatchError(
            f"Unit vector has length {unit_values.shape[-1]}, expected {space.n_dims}"
        )
    return space.lower + unit_values * space.widths


def points_to_arrays(
    space: ParameterSpace, points: Sequence[Point]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack points into (depths, normalized values, masks) arrays of shapes (n,), (n, D), (n, D)."""
    n = len(points)
    if n == 0:
        return (
            np.zeros(0, dtype=int),
            np.zeros((0, space.n_dims)),
            np.zeros((0, space.n_dims), dtype=bool),
        )
    depths = np.array([p.depth for p in points], dtype=int)
    masks = np.vstack([p.mask for p in points])
    if masks.shape[1] != space.n_dims:
        raise DimensionMismatchError(
            f"Points have {masks.shape[1]} dimensions, space has {space.n_dims}"
        )
    unit = np.vstack([normalize(space, p) for p in points])
    return depths, unit, masks


def with_depth(space: ParameterSpace, depth: int, values: Optional[Iterable[float]] = None) -> Point:
    """Convenience constructor: a point at `depth` with the given (or midpoint) values."""
    if values is None:
        values = (space.lower + space.upper) / 2.0
    raw = np.concatenate(([float(depth)], np.asarray(values, dtype=float)))
    return make_point(space, raw)


def sample_points(space: ParameterSpace, n: int, rng: np.random.Generator) -> List[Point]:
    """Draw n points with a uniform depth and uniform values on every dimension."""
    depths = rng.integers(0, space.max_depth + 1, size=n)
    values = space.lower + rng.uniform(size=(n, space.n_dims)) * space.widths
    return [
        Point(depth=int(d), values=_frozen(v.copy()), mask=space.mask_for_depth(int(d)))
        for d, v in zip(depths, values)
    ]


def point_rng(point: Point, seed: int, salt: int = 0) -> np.random.Generator:
    """Generator keyed by (seed, salt, conditional-equality key of the point).

    Conditionally equal points get identical streams; the stream does not depend on
    irrelevant coordinates or on the order points are seen in.
    """
    # Adding 0.0 maps -0.0 to 0.0, matching conditional equality
    bits = (point.relevant_values().astype(np.float64) + 0.0).view(np.uint64)
    entropy = [int(seed), int(salt), int(point.depth)] + [int(b) for b in bits]
    return np.random.default_rng(np.random.SeedSequence(entropy))
