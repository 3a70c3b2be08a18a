from core.space.parameter_space import (
    BoundViolationError,
    DepthOutOfRangeError,
    Dimension,
    DimensionMismatchError,
    ParameterSpace,
    Point,
    SpaceDefinitionError,
    denormalize,
    make_point,
    normalize,
    point_rng,
    points_to_arrays,
    relevance,
    sample_points,
    with_depth,
)

__all__ = [
    "BoundViolationError",
    "DepthOutOfRangeError",
    "Dimension",
    "DimensionMismatchError",
    "ParameterSpace",
    "Point",
    "SpaceDefinitionError",
    "denormalize",
    "make_point",
    "normalize",
    "point_rng",
    "points_to_arrays",
    "relevance",
    "sample_points",
    "with_depth",
]
