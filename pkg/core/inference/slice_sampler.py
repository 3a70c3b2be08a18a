# core/inference/slice_sampler.py
"""Coordinate-wise slice sampling with stepping out and shrinkage."""

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from config.app_config import config
from config.logging_config import get_module_logger

# Create a logger for this module
logger = get_module_logger("slice_sampler")

LogDensity = Callable[[np.ndarray], float]

# Bound on shrinkage proposals per step; exhausting it keeps the current value
MAX_SHRINK = 200


@dataclass(frozen=True, eq=False)
class HyperState:
    """Chain state: unconstrained vector, its cached log-density and the chain's generator."""
    theta: np.ndarray
    log_density: float
    rng: np.random.Generator

    @classmethod
    def start(cls, theta: np.ndarray, log_density: LogDensity, seed: int) -> "HyperState":
        theta = np.array(theta, dtype=float)
        return cls(theta=theta, log_density=float(log_density(theta)), rng=np.random.default_rng(seed))

    def consistent_with(self, log_density: LogDensity, tol: float = 1e-10) -> bool:
        """Recompute the density at theta and compare it with the cached value."""
        value = float(log_density(self.theta))
        if np.isinf(value) or np.isinf(self.log_density):
            return value == self.log_density
        return abs(value - self.log_density) <= tol * max(1.0, abs(value))


def slice_step(
    state: HyperState,
    axis: int,
    log_density: LogDensity,
    width: Optional[float] = None,
    max_stepout: Optional[int] = None,
) -> HyperState:
    """Update one coordinate of the chain.

    The interval of size `width` is placed at random around the current value and
    stepped out at most `max_stepout` times in total; once the limit is reached the
    interval is used as is. Proposals are then drawn uniformly and the interval shrunk
    towards the current value until one lands above the slice level.

    Args:
        state: Current chain state (its cached density must be finite)
        axis: Coordinate to update
        log_density: Unnormalized log target in unconstrained space
        width: Initial interval width, > 0
        max_stepout: Step-out budget m; left and right steps share it as J = floor(mV), K = m − 1 − J

    Returns:
        New state; every other coordinate is unchanged
    """
    width = config.inference.slice_width if width is None else width
    max_stepout = config.inference.max_stepout if max_stepout is None else max_stepout
    if not width > 0:
        raise ValueError(f"Slice width must be > 0, got {width}")
    if not np.isfinite(state.log_density):
        raise ValueError("Slice sampling needs a starting state with finite log density")

    rng = state.rng
    x0 = state.theta[axis]
    level = state.log_density + np.log(rng.uniform())

    def at(value: float) -> np.ndarray:
        theta = state.theta.copy()
        theta[axis] = value
        return theta

    left = x0 - width * rng.uniform()
    right = left + width
    j = int(np.floor(max_stepout * rng.uniform()))
    k = max_stepout - 1 - j
    while j > 0 and log_density(at(left)) > level:
        left -= width
        j -= 1
    while k > 0 and log_density(at(right)) > level:
        right += width
        k -= 1
    if j == 0 or k == 0:
        logger.debug(f"Step-out budget reached on axis {axis}; using interval [{left:.3g}, {right:.3g}]")

    for _ in range(MAX_SHRINK):
        proposal = left + (right - left) * rng.uniform()
        theta = at(proposal)
        value = float(log_density(theta))
        if value > level:
            return replace(state, theta=theta, log_density=value)
        if proposal < x0:
            left = proposal
        else:
            right = proposal

    logger.warning(f"Slice shrinkage did not terminate on axis {axis}; keeping current value")
    return state


def slice_sweep(
    state: HyperState,
    log_density: LogDensity,
    width: Optional[float] = None,
    max_stepout: Optional[int] = None,
    axes: Optional[Sequence[int]] = None,
) -> HyperState:
    """One pass over every coordinate (or `axes`) in a random order drawn from the chain."""
    axes = np.arange(state.theta.shape[0]) if axes is None else np.asarray(axes)
    for axis in state.rng.permutation(axes):
        state = slice_step(state, int(axis), log_density, width, max_stepout)
    return state
