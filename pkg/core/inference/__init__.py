from core.inference.hyper_inference import (
    HyperModel,
    HyperSample,
    InferenceError,
    fit_samples,
    log_posterior,
    map_optimize,
    predict_mixture,
    sample_hypers,
)
from core.inference.priors import HyperParameterization, HyperPrior
from core.inference.slice_sampler import HyperState, slice_step, slice_sweep

__all__ = [
    "HyperModel",
    "HyperParameterization",
    "HyperPrior",
    "HyperSample",
    "HyperState",
    "InferenceError",
    "fit_samples",
    "log_posterior",
    "map_optimize",
    "predict_mixture",
    "sample_hypers",
    "slice_step",
    "slice_sweep",
]
