from core.bench.baselines import fill_in_random, linear_baseline, random_fill_features, relevant_features
from core.bench.bo_experiment import BO_OUTPUTS, BoArm, BoResults, run_bo_experiment, run_seed, write_bo_results
from core.bench.metrics import MetricError, mean_and_sd, nmse
from core.bench.model_registry import BenchRegistry, ComponentRegistry, UnknownComponentError, bo_arm, surrogate_model
from core.bench.regression_experiment import (
    REGRESSION_OUTPUTS,
    ExperimentError,
    FoldResult,
    RegressionResults,
    run_fold,
    run_regression_experiment,
    write_regression_results,
)
from core.bench.run_events import RunContext, RunEventManager, step_timing
from core.bench.surrogate_models import RegressionModel
from core.bench.synthetic_objective import (
    ObjectiveDefinitionError,
    SyntheticObjective,
    eval_synthetic,
    generate_dataset,
)

__all__ = [
    "BO_OUTPUTS",
    "REGRESSION_OUTPUTS",
    "BenchRegistry",
    "BoArm",
    "BoResults",
    "ComponentRegistry",
    "ExperimentError",
    "FoldResult",
    "MetricError",
    "ObjectiveDefinitionError",
    "RegressionModel",
    "RegressionResults",
    "RunContext",
    "RunEventManager",
    "SyntheticObjective",
    "UnknownComponentError",
    "bo_arm",
    "eval_synthetic",
    "fill_in_random",
    "generate_dataset",
    "linear_baseline",
    "mean_and_sd",
    "nmse",
    "random_fill_features",
    "relevant_features",
    "run_bo_experiment",
    "run_fold",
    "run_regression_experiment",
    "run_seed",
    "step_timing",
    "surrogate_model",
    "write_bo_results",
    "write_regression_results",
]
