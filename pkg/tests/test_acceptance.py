"""End-to-end checks on the bundled objective and default experiment settings."""

import os
import time

import numpy as np
import pytest

from config.app_config import config
from config.experiment_config import BoExperimentConfig, RegressionExperimentConfig, load_config
from core.bench.bo_experiment import run_bo_experiment
from core.bench.regression_experiment import run_regression_experiment
from core.inference.hyper_inference import HyperModel, sample_hypers
from core.kernels.arc_kernel import ArcKernel, ArcParams
from core.kernels.property_checks import KernelPropertySuite, all_passed
from core.space.parameter_space import Dimension, ParameterSpace, sample_points

pytestmark = pytest.mark.slow

# Runtime bounds hold for an 8-core desk machine and scale up linearly on fewer cores
REFERENCE_WORKERS = 8
WORKERS = min(os.cpu_count() or 1, REFERENCE_WORKERS)


def _defaults(name, model_class, **overrides):
    overrides.setdefault("max_workers", WORKERS)
    return load_config(os.path.join(config.bench.defaults_dir, name), model_class, overrides)


def _check_runtime(start, minutes, record_property):
    elapsed = time.perf_counter() - start
    limit = 60.0 * minutes * REFERENCE_WORKERS / WORKERS
    record_property("elapsed_seconds", round(elapsed, 1))
    record_property("limit_seconds", limit)
    assert elapsed < limit, f"took {elapsed:.0f} s with {WORKERS} workers, limit {limit:.0f} s"


def test_kernel_suite_on_objective_space(objective):
    start = time.perf_counter()
    results = KernelPropertySuite(objective.space, seed=0).run()
    assert all_passed(results), [r.detail for r in results if not r.passed]
    assert time.perf_counter() - start < 30.0


def test_posterior_recovers_switching_scale():
    space = ParameterSpace(
        max_depth=1, dims=(Dimension("g", 0.0, 1.0, layer=0), Dimension("a", 0.0, 1.0, layer=1))
    )
    truth = ArcParams(omega=[1.0, 1.5], rho=[0.5, 0.5])
    rng = np.random.default_rng(21)
    points = sample_points(space, 100, rng)
    gram = ArcKernel(space, truth).gram(points) + 1e-6 * np.eye(100)
    targets = np.linalg.cholesky(gram) @ rng.normal(size=100) + 0.01 * rng.normal(size=100)

    model = HyperModel(ArcKernel(space, ArcParams.default(2)), points, targets)
    samples = sample_hypers(model, n_samples=30, burn_in=100, thin=2, seed=0)
    median_omega = np.median([s.params.omega[1] for s in samples])
    assert 1.5 / 3.0 <= median_omega <= 1.5 * 3.0


def test_regression_ordering(record_property):
    start = time.perf_counter()
    results = run_regression_experiment(_defaults("regress.json", RegressionExperimentConfig))
    summary = results.summary.set_index("model")
    arc = summary.loc["arc_gp", "nmse_mean"]
    assert arc < summary.loc["plain_gp_random_fill", "nmse_mean"]
    assert arc < summary.loc["linear_regression", "nmse_mean"]

    separate = summary.loc[["arc_gp_separate", "plain_gp_separate"]]
    pooled_sd = np.sqrt(np.mean(separate["nmse_sd"] ** 2))
    assert abs(separate["nmse_mean"].diff().iloc[-1]) <= pooled_sd
    _check_runtime(start, 5, record_property)


def test_optimization_ordering(record_property):
    start = time.perf_counter()
    cfg = _defaults("optimize.json", BoExperimentConfig, seeds=list(range(20)))
    summary = run_bo_experiment(cfg).summary.set_index("model")
    medians = summary["final_incumbent_median"]
    assert medians["arc_gp"] <= medians["random_fill"] <= medians["random_search"]
    assert summary.loc["arc_gp", "deep_fraction"] > summary.loc["random_fill", "deep_fraction"]
    _check_runtime(start, 10, record_property)
