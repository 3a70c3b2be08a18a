# core/bench/baselines.py
"""Feature encodings and the linear model used by the baseline surrogates."""

from typing import Sequence

import numpy as np
from sklearn.linear_model import Ridge

from core.space.parameter_space import ParameterSpace, Point, point_rng

# Stream salt for random fill, distinct from the objective's
FILL_SALT = 3

RIDGE_ALPHA = 1e-6


def fill_in_random(space: ParameterSpace, point: Point, seed: int) -> np.ndarray:
    """Raw values of all D dimensions with irrelevant ones drawn uniformly in their bounds.

    The draws come from a stream keyed by (seed, point), so a point is filled the same
    way on every refit.
    """
    draws = space.lower + point_rng(point, seed, FILL_SALT).uniform(size=space.n_dims) * space.widths
    return np.where(point.mask, point.values, draws)


def random_fill_features(space: ParameterSpace, points: Sequence[Point], seed: int) -> np.ndarray:
    """(n, D + 1) features: normalized depth followed by normalized filled values."""
    if len(points) == 0:
        return np.zeros((0, space.cube_dimension))
    filled = np.vstack([fill_in_random(space, p, seed) for p in points])
    unit = (filled - space.lower) / space.widths
    depth = np.array([p.depth for p in points], dtype=float) / max(space.max_depth, 1)
    return np.column_stack([depth, unit])


def relevant_features(space: ParameterSpace, points: Sequence[Point]) -> np.ndarray:
    """(n, k) normalized relevant values; all points must share one depth."""
    depths = {p.depth for p in points}
    if len(depths) > 1:
        raise ValueError(f"Points span several depths: {sorted(depths)}")
    if not points:
        return np.zeros((0, 0))
    mask = points[0].mask
    return np.vstack([((p.values - space.lower) / space.widths)[mask] for p in points])


def ridge_predict(
    train_features: np.ndarray, train_targets: np.ndarray, test_features: np.ndarray, alpha: float = RIDGE_ALPHA
) -> np.ndarray:
    """Least squares with an intercept and a small ridge term for rank safety."""
    model = Ridge(alpha=alpha, fit_intercept=True)
    model.fit(train_features, train_targets)
    return model.predict(test_features)


def linear_baseline(
    space: ParameterSpace,
    train_points: Sequence[Point],
    train_targets: np.ndarray,
    test_points: Sequence[Point],
    fill_seed: int = 0,
) -> np.ndarray:
    """Linear regression on random-fill features.

    Raises:
        ValueError: With fewer than D + 2 training rows
    """
    if len(train_points) < space.n_dims + 2:
        raise ValueError(
            f"Linear baseline needs at least {space.n_dims + 2} training rows, got {len(train_points)}"
        )
    return ridge_predict(
        random_fill_features(space, train_points, fill_seed),
        np.asarray(train_targets, dtype=float),
        random_fill_features(space, test_points, fill_seed),
    )
