# core/bench/regression_experiment.py
"""Cross-validated NMSE comparison of the regression models on the synthetic dataset."""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd
from sklearn.model_selection import KFold

from config.experiment_config import RegressionExperimentConfig
from config.logging_config import get_module_logger
from core.bench.metrics import mean_and_sd, nmse
from core.bench.model_registry import BenchRegistry
from core.bench.run_events import RunContext, step_timing
from core.bench.synthetic_objective import SyntheticObjective, generate_dataset
from core.gp.gp_model import apply_warp
from core.optimization.surrogates import SurrogateSettings
from utils.error_handling import ConditionalBOError

# Registers the models
import core.bench.surrogate_models  # noqa: F401

# Create a logger for this module
logger = get_module_logger("regression_experiment")

CSV_FLOAT_FORMAT = "%.10g"
REGRESSION_OUTPUTS = ("nmse.csv", "nmse_summary.csv")


class ExperimentError(ConditionalBOError):
    """Exception raised when a bench run (fold or optimization seed) fails."""
    pass


@dataclass
class FoldResult:
    model: str
    seed: int
    fold: int
    nmse: float
    nmse_original: float


@dataclass
class RegressionResults:
    folds: pd.DataFrame
    summary: pd.DataFrame


def _objective(cfg: RegressionExperimentConfig, seed: int) -> SyntheticObjective:
    return SyntheticObjective.from_json(cfg.objective.path, seed=seed, noise_sd=cfg.objective.noise_sd)


def _settings(cfg: RegressionExperimentConfig) -> SurrogateSettings:
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


def _splits(n: int, folds: int, seed: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    return list(KFold(n_splits=folds, shuffle=True, random_state=seed).split(np.arange(n)))


def run_fold(cfg: RegressionExperimentConfig, model_name: str, seed: int, fold: int) -> FoldResult:
    """Fit one model on one training split and score it on the held-out split.

    The dataset and split are regenerated from (config, seed), so folds can run in any
    process and in any order.
    """
    objective = _objective(cfg, seed)
    points, values = generate_dataset(objective, cfg.n_points, seed)
    train, test = _splits(len(points), cfg.folds, seed)[fold]

    model = BenchRegistry.registry("surrogate_model").create(
        model_name,
        space=objective.space,
        settings=_settings(cfg),
        base=cfg.base,
        alpha=cfg.alpha,
        fill_seed=seed,
        seed=int(np.random.SeedSequence([seed, fold]).generate_state(1)[0]),
    )
    actual = values[test]
    try:
        model.fit([points[i] for i in train], values[train])
        mean, var = model.predict([points[i] for i in test])
        score = nmse(mean, apply_warp(actual, cfg.warp))
        score_original = nmse(model.transform.to_original(mean, var), actual)
    except (ConditionalBOError, ValueError) as e:
        raise ExperimentError(f"{model_name} failed on seed {seed}, fold {fold}: {e}") from e
    get_module_logger("regression_experiment", {"model": model_name, "seed": seed, "fold": fold}).debug(
        f"NMSE {score:.4f} (original space {score_original:.4f})"
    )
    return FoldResult(model_name, seed, fold, score, score_original)


def _tasks(cfg: RegressionExperimentConfig) -> List[Tuple[str, int, int]]:
    return [(m, s, f) for m in cfg.models for s in cfg.seeds for f in range(cfg.folds)]


def summarize(folds: pd.DataFrame, model_order: List[str]) -> pd.DataFrame:
    """Mean ± sd of NMSE per model over every (seed, fold)."""
    rows = []
    for name in model_order:
        group = folds[folds["model"] == name]
        warped = mean_and_sd(group["nmse"])
        original = mean_and_sd(group["nmse_original"])
        rows.append(
            {
                "model": name,
                "nmse_mean": warped["mean"],
                "nmse_sd": warped["sd"],
                "nmse_original_mean": original["mean"],
                "nmse_original_sd": original["sd"],
                "n": len(group),
            }
        )
    return pd.DataFrame(rows)


@step_timing("regression_experiment")
def run_regression_experiment(cfg: RegressionExperimentConfig, context: RunContext = None) -> RegressionResults:
    """Run every (model, seed, fold) and collect per-fold and summary tables.

    Results do not depend on `max_workers`: they are merged and sorted by
    (model order, seed, fold).
    """
    tasks = _tasks(cfg)
    logger.info(f"Regression experiment: {len(cfg.models)} models x {len(cfg.seeds)} seeds x {cfg.folds} folds")

    if cfg.max_workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.max_workers) as executor:
            futures = [executor.submit(run_fold, cfg, *task) for task in tasks]
            results = [future.result() for future in futures]
    else:
        results = [run_fold(cfg, *task) for task in tasks]

    order: Dict[str, int] = {name: i for i, name in enumerate(cfg.models)}
    results.sort(key=lambda r: (order[r.model], r.seed, r.fold))
    if context is not None:
        for r in results:
            context.record_metric("regression_experiment", f"nmse/{r.model}", r.nmse)

    folds = pd.DataFrame(
        [asdict(r) for r in results], columns=["model", "seed", "fold", "nmse", "nmse_original"]
    )
    return RegressionResults(folds=folds, summary=summarize(folds, list(cfg.models)))


def write_regression_results(results: RegressionResults, out_dir: str) -> List[str]:
    """Write nmse.csv and nmse_summary.csv; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, name) for name in REGRESSION_OUTPUTS]
    results.folds.to_csv(paths[0], index=False, float_format=CSV_FLOAT_FORMAT)
    results.summary.to_csv(paths[1], index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {', '.join(paths)}")
    return paths
