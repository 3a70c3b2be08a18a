# core/bench/bo_experiment.py
"""Repeated optimization runs comparing the arc-kernel arm, the random-fill baseline and random search."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.experiment_config import BoExperimentConfig
from config.logging_config import get_module_logger
from core.bench.baselines import random_fill_features
from core.bench.model_registry import BenchRegistry, bo_arm
from core.bench.regression_experiment import CSV_FLOAT_FORMAT, ExperimentError
from core.bench.run_events import RunContext, step_timing
from core.bench.synthetic_objective import SyntheticObjective
from core.optimization.bo_loop import BoSettings, create_state, history_frame, run_loop
from core.optimization.surrogates import ArcSurrogate, FeatureSurrogate, Surrogate, SurrogateSettings
from core.space.parameter_space import ParameterSpace
from utils.error_handling import ConditionalBOError

# Create a logger for this module
logger = get_module_logger("bo_experiment")

BO_OUTPUTS = ("trajectories.csv", "architectures.csv", "bo_summary.csv")
HISTORY_DIR = "histories"


class BoArm:
    """An optimization strategy: builds the surrogate a run uses after its initial design."""

    def __init__(
        self,
        space: ParameterSpace,
        settings: SurrogateSettings,
        base: str = "matern52",
        alpha: Optional[float] = None,
        fill_seed: int = 0,
    ):
        self.space = space
        self.settings = settings
        self.base = base
        self.alpha = alpha
        self.fill_seed = fill_seed

    def surrogate(self) -> Optional[Surrogate]:
        raise NotImplementedError("Subclasses must implement surrogate")


@bo_arm("arc_gp")
class ArcGpArm(BoArm):
    def surrogate(self) -> Surrogate:
        return ArcSurrogate(self.space, self.base, self.alpha, settings=self.settings)


@bo_arm("random_fill")
class RandomFillArm(BoArm):
    """Plain GP on [depth, values] with irrelevant values filled by seeded uniform draws."""

    def surrogate(self) -> Surrogate:
        encoder = partial(random_fill_features, self.space, seed=self.fill_seed)
        return FeatureSurrogate(
            encoder, self.space.cube_dimension, self.base, self.alpha, settings=self.settings
        )


@bo_arm("random_search")
class RandomSearchArm(BoArm):
    """No model: candidates are evaluated in grid order."""

    def surrogate(self) -> None:
        return None


@dataclass
class SeedRun:
    arm: str
    seed: int
    history: pd.DataFrame

    @property
    def final_incumbent(self) -> float:
        return float(self.history["incumbent"].iloc[-1])


@dataclass
class BoResults:
    trajectories: pd.DataFrame
    architectures: pd.DataFrame
    summary: pd.DataFrame
    histories: Dict[Tuple[str, int], pd.DataFrame]


def _settings(cfg: BoExperimentConfig) -> SurrogateSettings:
    inference = cfg.inference
    return SurrogateSettings(
        method=inference.method,
        n_samples=inference.n_samples,
        burn_in=inference.burn_in,
        thin=inference.thin,
        refresh_burn_in=inference.refresh_burn_in,
        map_restarts=inference.map_restarts,
        warp=cfg.warp,
    )


def run_seed(cfg: BoExperimentConfig, arm_name: str, seed: int) -> SeedRun:
    """One optimization run of one arm.

    Every arm shares the same candidate grid; the seed keys the objective's noise, the
    hyperparameter chains and the random fill.
    """
    objective = SyntheticObjective.from_json(cfg.objective.path, seed=seed, noise_sd=cfg.objective.noise_sd)
    arm = BenchRegistry.registry("bo_arm").create(
        arm_name,
        space=objective.space,
        settings=_settings(cfg),
        base=cfg.base,
        alpha=cfg.alpha,
        fill_seed=seed,
    )
    settings = BoSettings(grid_size=cfg.grid_size, init_count=cfg.init_count, scramble_seed=cfg.scramble_seed)
    try:
        state = create_state(objective.space, seed, settings)
        state = run_loop(
            objective.space,
            objective,
            cfg.budget,
            init_count=cfg.init_count,
            seed=seed,
            surrogate=arm.surrogate(),
            settings=settings,
            state=state,
        )
    except ConditionalBOError as e:
        raise ExperimentError(f"Arm {arm_name} failed on seed {seed}: {e}") from e
    return SeedRun(arm_name, seed, history_frame(state))


def trajectory_table(runs: List[SeedRun]) -> pd.DataFrame:
    frames = [
        pd.DataFrame(
            {
                "model": run.arm,
                "seed": run.seed,
                "iteration": run.history["iteration"],
                "depth": run.history["depth"],
                "objective": run.history["objective"],
                "incumbent": run.history["incumbent"],
            }
        )
        for run in runs
    ]
    return pd.concat(frames, ignore_index=True)


def architecture_table(runs: List[SeedRun], arms: List[str], max_depth: int) -> pd.DataFrame:
    """Evaluations per (arm, depth) summed over seeds, including depths never visited."""
    rows = []
    for arm in arms:
        depths = np.concatenate([run.history["depth"].to_numpy(dtype=int) for run in runs if run.arm == arm])
        counts = np.bincount(depths, minlength=max_depth + 1)
        rows.extend({"model": arm, "depth": d, "count": int(c)} for d, c in enumerate(counts))
    return pd.DataFrame(rows, columns=["model", "depth", "count"])


def summary_table(runs: List[SeedRun], arms: List[str], deep_depth: int) -> pd.DataFrame:
    rows = []
    for arm in arms:
        arm_runs = [run for run in runs if run.arm == arm]
        finals = np.array([run.final_incumbent for run in arm_runs])
        depths = np.concatenate([run.history["depth"].to_numpy(dtype=int) for run in arm_runs])
        rows.append(
            {
                "model": arm,
                "final_incumbent_median": float(np.median(finals)),
                "final_incumbent_mean": float(np.mean(finals)),
                "final_incumbent_sd": float(np.std(finals, ddof=1)) if finals.size > 1 else 0.0,
                "deep_fraction": float(np.mean(depths >= deep_depth)),
                "n_seeds": len(arm_runs),
            }
        )
    return pd.DataFrame(rows)


@step_timing("bo_experiment")
def run_bo_experiment(cfg: BoExperimentConfig, context: RunContext = None) -> BoResults:
    """Run every (arm, seed) and collect trajectories, depth counts and a per-arm summary.

    Results are merged in (arm order, seed) order whatever `max_workers` is.

    Raises:
        ExperimentError: If the grid is smaller than the budget or a run fails
    """
    if cfg.grid_size < cfg.budget:
        raise ExperimentError(f"grid_size ({cfg.grid_size}) must be >= budget ({cfg.budget})")

    tasks = [(arm, seed) for arm in cfg.arms for seed in cfg.seeds]
    logger.info(f"BO experiment: {len(cfg.arms)} arms x {len(cfg.seeds)} seeds, budget {cfg.budget}")

    if cfg.max_workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.max_workers) as executor:
            futures = [executor.submit(run_seed, cfg, *task) for task in tasks]
            runs = [future.result() for future in futures]
    else:
        runs = [run_seed(cfg, *task) for task in tasks]

    order = {name: i for i, name in enumerate(cfg.arms)}
    runs.sort(key=lambda r: (order[r.arm], r.seed))
    if context is not None:
        for run in runs:
            context.record_metric("bo_experiment", f"final_incumbent/{run.arm}", run.final_incumbent)

    max_depth = SyntheticObjective.from_json(cfg.objective.path).space.max_depth
    arms = list(cfg.arms)
    return BoResults(
        trajectories=trajectory_table(runs),
        architectures=architecture_table(runs, arms, max_depth),
        summary=summary_table(runs, arms, cfg.deep_depth),
        histories={(run.arm, run.seed): run.history for run in runs},
    )


def write_bo_results(results: BoResults, out_dir: str) -> List[str]:
    """Write the three tables plus one history CSV per run; returns the written paths."""
    os.makedirs(os.path.join(out_dir, HISTORY_DIR), exist_ok=True)
    paths = [os.path.join(out_dir, name) for name in BO_OUTPUTS]
    for frame, path in zip((results.trajectories, results.architectures, results.summary), paths):
        frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    for (arm, seed), history in results.histories.items():
        path = os.path.join(out_dir, HISTORY_DIR, f"{arm}_seed{seed}.csv")
        history.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        paths.append(path)
    logger.info(f"Wrote {len(paths)} files to {out_dir}")
    return paths
