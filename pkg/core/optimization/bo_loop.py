# core/optimization/bo_loop.py
"""The grid-based Bayesian-optimization loop (minimization).

Candidates are a fixed Sobol grid on [0, 1]^(D+1) decoded into conditional points.
The first `init_count` evaluations take the grid head in order; afterwards each
iteration refits the surrogate and evaluates the unevaluated candidate with the
highest integrated EI.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.app_config import config
from config.logging_config import get_module_logger
from core.gp.gp_model import SingularKernelError
from core.optimization.sobol_grid import sobol_grid
from core.optimization.surrogates import Surrogate
from core.space.parameter_space import (
    BoundViolationError,
    DimensionMismatchError,
    ParameterSpace,
    Point,
    make_point,
)
from utils.error_handling import ConditionalBOError

# Create a logger for this module
logger = get_module_logger("bo_loop")

Objective = Callable[[Point], float]

# Column format shared by every CSV the loop writes
CSV_FLOAT_FORMAT = "%.10g"


class GridExhaustedError(ConditionalBOError):
    """Exception raised when every grid candidate has been evaluated."""
    pass


class EmptyHistoryError(ConditionalBOError):
    """Exception raised when a model-based suggestion is requested without observations."""
    pass


@dataclass
class BoSettings:
    """Loop settings; `scramble_seed` keys an optional digital scramble of the grid."""
    grid_size: int = config.optimization.grid_size
    init_count: int = config.optimization.init_count
    scramble_seed: Optional[int] = None


@dataclass
class Observation:
    iteration: int
    point: Point
    value: float
    grid_index: int
    failed: bool = False


@dataclass
class BoState:
    """Loop state. History is append-only; the incumbent is its minimum value."""
    space: ParameterSpace
    grid: np.ndarray
    candidates: List[Point]
    seed: int
    history: List[Observation] = field(default_factory=list)
    evaluated: np.ndarray = None
    _by_key: Dict[tuple, List[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.evaluated is None:
            self.evaluated = np.zeros(len(self.candidates), dtype=bool)
        if not self._by_key:
            for index, point in enumerate(self.candidates):
                self._by_key.setdefault(point.key(), []).append(index)

    @property
    def incumbent(self) -> float:
        if not self.history:
            raise EmptyHistoryError("No observations yet")
        return min(obs.value for obs in self.history)

    @property
    def values(self) -> np.ndarray:
        return np.array([obs.value for obs in self.history])

    @property
    def points(self) -> List[Point]:
        return [obs.point for obs in self.history]

    def remaining(self) -> np.ndarray:
        """Indices of candidates not conditionally equal to any evaluated point, ascending."""
        return np.flatnonzero(~self.evaluated)

    def incumbent_trajectory(self) -> np.ndarray:
        return np.minimum.accumulate(self.values) if self.history else np.zeros(0)

    def record(self, grid_index: int, point: Point, value: float, failed: bool = False) -> Observation:
        obs = Observation(len(self.history), point, float(value), grid_index, failed)
        self.history.append(obs)
        for index in self._by_key.get(point.key(), [grid_index]):
            self.evaluated[index] = True
        return obs


def decode(space: ParameterSpace, unit_vector: Sequence[float]) -> Point:
    """Map a unit-cube vector [u_depth, u_1..u_D] to a conditional point.

    depth = min(floor(u_depth·(L + 1)), L); each u_i is scaled to [l_i, u_i].

    Raises:
        DimensionMismatchError: If the vector does not have length D + 1
        BoundViolationError: If an entry lies outside [0, 1]
    """
    u = np.asarray(unit_vector, dtype=float).ravel()
    if u.shape[0] != space.cube_dimension:
        raise DimensionMismatchError(
            f"Unit vector has length {u.shape[0]}, expected {space.cube_dimension}"
        )
    if not np.all((u >= 0.0) & (u <= 1.0)):
        raise BoundViolationError("Unit-cube coordinates must lie in [0, 1]")

    depth = min(int(math.floor(u[0] * (space.max_depth + 1))), space.max_depth)
    values = np.clip(space.lower + u[1:] * space.widths, space.lower, space.upper)
    return make_point(space, np.concatenate(([float(depth)], values)))


def create_state(space: ParameterSpace, seed: int = 0, settings: Optional[BoSettings] = None) -> BoState:
    """Fix the candidate grid for a run."""
    settings = settings or BoSettings()
    grid = sobol_grid(space.cube_dimension, settings.grid_size, settings.scramble_seed)
    candidates = [decode(space, u) for u in grid]
    return BoState(space=space, grid=grid, candidates=candidates, seed=seed)


def _chain_seed(seed: int, iteration: int) -> int:
    return int(np.random.SeedSequence([seed, iteration]).generate_state(1)[0])


def fit_surrogate(state: BoState, surrogate: Surrogate) -> Surrogate:
    """Refit the surrogate on the state's history.

    Raises:
        EmptyHistoryError: If nothing has been observed
    """
    if not state.history:
        raise EmptyHistoryError("Cannot fit a surrogate without observations")
    surrogate.fit(state.points, state.values, _chain_seed(state.seed, len(state.history)))
    return surrogate


def integrated_ei(state: BoState, surrogate: Surrogate, candidate: Point) -> float:
    """Integrated EI of one candidate under a surrogate already fitted to `state`."""
    return float(surrogate.score([candidate])[0])


def _best_remaining(state: BoState, surrogate: Surrogate) -> Tuple[int, float]:
    remaining = state.remaining()
    if remaining.size == 0:
        raise GridExhaustedError(f"All {len(state.candidates)} grid candidates have been evaluated")
    scores = surrogate.score([state.candidates[i] for i in remaining])
    # argmax returns the first maximum, i.e. the lowest grid index
    best = int(np.argmax(scores))
    return int(remaining[best]), float(scores[best])


def suggest(state: BoState, surrogate: Surrogate) -> Point:
    """Refit the surrogate and return the unevaluated candidate with the highest integrated EI.

    Raises:
        EmptyHistoryError: If nothing has been observed
        GridExhaustedError: If no candidate remains
    """
    if state.remaining().size == 0:
        raise GridExhaustedError(f"All {len(state.candidates)} grid candidates have been evaluated")
    fit_surrogate(state, surrogate)
    index, _ = _best_remaining(state, surrogate)
    return state.candidates[index]


def _next_in_order(state: BoState) -> int:
    remaining = state.remaining()
    if remaining.size == 0:
        raise GridExhaustedError(f"All {len(state.candidates)} grid candidates have been evaluated")
    return int(remaining[0])


def impute_failure(values: Sequence[float]) -> float:
    """Penalty for a failed evaluation: the worst finite value plus one standard deviation.

    The deviation is that of the finite observations (1.0 with fewer than two), which is
    one prior standard deviation of the standardized targets the surrogates model; with no
    finite observation the penalty is 1.0.
    """
    finite = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
    if finite.size == 0:
        return 1.0
    spread = float(np.std(finite)) if finite.size >= 2 else 1.0
    return float(np.max(finite)) + (spread if spread > 0 else 1.0)


def run_loop(
    space: ParameterSpace,
    objective: Objective,
    budget: int,
    init_count: Optional[int] = None,
    seed: int = 0,
    surrogate: Optional[Surrogate] = None,
    settings: Optional[BoSettings] = None,
    state: Optional[BoState] = None,
) -> BoState:
    """Run the loop for `budget` evaluations.

    Args:
        space: Search space
        objective: Function to minimize; non-finite results are imputed (see impute_failure)
        budget: Total evaluations, >= init_count
        init_count: Evaluations taken from the grid head before any model is fitted
        seed: Seed for the hyperparameter chains
        surrogate: Model used after the initial design; None runs pure grid search
        settings: Grid settings
        state: Optional pre-built state (its grid is reused)

    Returns:
        Final BoState

    Raises:
        ValueError: If budget < init_count or init_count < 1
        GridExhaustedError: If the grid runs out before the budget
    """
    settings = settings or BoSettings()
    init_count = settings.init_count if init_count is None else init_count
    if init_count < 1 or budget < init_count:
        raise ValueError(f"Need budget >= init_count >= 1, got budget={budget}, init_count={init_count}")

    state = state or create_state(space, seed, settings)
    arm = surrogate.name if surrogate is not None else "grid"
    run_logger = get_module_logger("bo_loop", {"arm": arm, "seed": seed})

    for iteration in range(budget):
        index = None
        if surrogate is not None and iteration >= init_count:
            try:
                fit_surrogate(state, surrogate)
                index, score = _best_remaining(state, surrogate)
                run_logger.debug(f"Iteration {iteration}: candidate {index} with integrated EI {score:.4g}")
            except SingularKernelError as e:
                run_logger.warning(f"Surrogate fit failed at iteration {iteration} ({e}); taking next grid point")
        if index is None:
            index = _next_in_order(state)

        point = state.candidates[index]
        value = float(objective(point))
        failed = not math.isfinite(value)
        if failed:
            value = impute_failure(state.values)
            run_logger.warning(f"Objective failed at iteration {iteration}; imputed {value:.4g}")
        state.record(index, point, value, failed)

    run_logger.info(f"Finished {budget} evaluations, incumbent {state.incumbent:.6g}")
    return state


def history_frame(state: BoState) -> pd.DataFrame:
    """History table: iteration, depth, one column per dimension (blank if irrelevant), objective, incumbent."""
    names = [d.name for d in state.space.dims]
    rows = []
    for obs, incumbent in zip(state.history, state.incumbent_trajectory()):
        row = {"iteration": obs.iteration, "depth": obs.point.depth}
        row.update({n: (v if m else np.nan) for n, v, m in zip(names, obs.point.values, obs.point.mask)})
        row.update({"objective": obs.value, "incumbent": float(incumbent)})
        rows.append(row)
    return pd.DataFrame(rows, columns=["iteration", "depth"] + names + ["objective", "incumbent"])


def export_history_csv(state: BoState, path: str) -> None:
    history_frame(state).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {len(state.history)} history rows to {path}")
