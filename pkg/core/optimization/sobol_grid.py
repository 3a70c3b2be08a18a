# core/optimization/sobol_grid.py
"""Sobol candidate grids on the unit cube.

Points come from scipy's Sobol generator, which ships the Joe–Kuo direction numbers.
The all-zero first point of the unscrambled sequence is skipped, so in one dimension
the grid starts 0.5, 0.75, 0.25, ...
"""

import warnings
from typing import Optional

import numpy as np
from scipy.stats import qmc

from config.logging_config import get_module_logger
from utils.error_handling import ConditionalBOError

# Create a logger for this module
logger = get_module_logger("sobol_grid")

# Size of the bundled direction-number table
SOBOL_MAX_DIM = 21201


class SobolDimensionError(ConditionalBOError, ValueError):
    """Exception raised when a grid dimension is outside the direction-number table."""
    pass


def sobol_grid(dimension: int, count: int, scramble_seed: Optional[int] = None) -> np.ndarray:
    """First `count` points of a Sobol sequence in [0, 1]^dimension.

    Args:
        dimension: Number of coordinates, 1..SOBOL_MAX_DIM
        count: Number of points, >= 1
        scramble_seed: If given, apply a digital (Owen-type) scramble keyed by this seed

    Returns:
        Array of shape (count, dimension)

    Raises:
        SobolDimensionError: If dimension is outside the supported range
        ValueError: If count < 1
    """
    if not 1 <= dimension <= SOBOL_MAX_DIM:
        raise SobolDimensionError(
            f"Sobol dimension must be in [1, {SOBOL_MAX_DIM}], got {dimension}"
        )
    if count < 1:
        raise ValueError(f"Grid size must be >= 1, got {count}")

    scramble = scramble_seed is not None
    engine = qmc.Sobol(d=dimension, scramble=scramble, seed=scramble_seed)
    with warnings.catch_warnings():
        # Balance properties only matter for power-of-two prefixes
        warnings.simplefilter("ignore", UserWarning)
        engine.fast_forward(1)
        points = engine.random(count)
    logger.debug(f"Generated Sobol grid: {count} points in {dimension} dimensions (scrambled={scramble})")
    return points
