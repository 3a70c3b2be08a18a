import os

import numpy as np
import pandas as pd
import pytest

from config.experiment_config import BoExperimentConfig, InferenceSettings, RegressionExperimentConfig
from core.bench.baselines import (
    fill_in_random,
    linear_baseline,
    random_fill_features,
    relevant_features,
    ridge_predict,
)
from core.bench.bo_experiment import BO_OUTPUTS, run_bo_experiment, run_seed, write_bo_results
from core.bench.metrics import MetricError, mean_and_sd, nmse
from core.bench.model_registry import BenchRegistry, ComponentRegistry, UnknownComponentError
from core.bench.regression_experiment import (
    REGRESSION_OUTPUTS,
    ExperimentError,
    run_regression_experiment,
    write_regression_results,
)
from core.bench.run_events import EventSubscriber, RunContext, RunEventManager, step_timing
from core.bench.surrogate_models import (
    ArcGpModel,
    ArcGpSeparateModel,
    PlainGpRandomFillModel,
    PlainGpSeparateModel,
)
from core.bench.synthetic_objective import ObjectiveDefinitionError, SyntheticObjective, generate_dataset
from core.optimization.surrogates import SurrogateSettings
from core.space.parameter_space import make_point, sample_points, with_depth

FAST_MAP = SurrogateSettings(method="map", map_restarts=1)


def _depth_points(space, depth, n, rng):
    values = space.lower + rng.uniform(size=(n, space.n_dims)) * space.widths
    return [with_depth(space, depth, v) for v in values]


class TestSyntheticObjective:
    def test_optimum(self, objective):
        assert objective(objective.optimum_point()) == pytest.approx(0.1)
        assert objective.minimum() == pytest.approx(0.1)

    def test_irrelevant_coordinates_ignored(self, objective, rng):
        space = objective.space
        a = space.lower + rng.uniform(size=space.n_dims) * space.widths
        b = np.where(space.mask_for_depth(2), a, space.upper)
        assert objective(with_depth(space, 2, a)) == objective(with_depth(space, 2, b))

    def test_noise_is_a_function_of_seed_and_point(self):
        point = SyntheticObjective.from_json().optimum_point()
        noisy = SyntheticObjective.from_json(seed=3, noise_sd=0.02)
        other = SyntheticObjective.from_json(seed=4, noise_sd=0.02)
        assert noisy(point) == noisy(point)
        assert noisy(point) != other(point)
        assert noisy(point) != pytest.approx(0.1, abs=1e-12)

    def test_output_is_clipped(self, flat_space):
        steep = SyntheticObjective(flat_space, optima=[0.0], weights=[10.0], depth_bonus=[0.0])
        assert steep(with_depth(flat_space, 0, [1.0])) == 1.0
        sunk = SyntheticObjective(flat_space, optima=[0.0], weights=[0.0], depth_bonus=[0.5], base_value=0.0)
        assert sunk(with_depth(flat_space, 0, [0.0])) == 1e-6

    def test_generate_dataset(self, objective):
        points, values = generate_dataset(objective, 40, seed=1)
        again, _ = generate_dataset(objective, 40, seed=1)
        assert len(points) == 40 and values.shape == (40,)
        assert points == again
        assert values.tolist() == [objective(p) for p in points]
        assert np.all((values >= 1e-6) & (values <= 1.0))

    def test_inconsistent_definition(self, flat_space):
        with pytest.raises(ObjectiveDefinitionError):
            SyntheticObjective(flat_space, optima=[0.0, 0.5], weights=[1.0], depth_bonus=[0.0])
        with pytest.raises(ObjectiveDefinitionError):
            SyntheticObjective.from_dict({"max_depth": 1})


class TestBaselines:
    def test_fill_keeps_relevant_values(self, small_space):
        point = make_point(small_space, [1, 0.3, -0.4, 99.0])
        filled = fill_in_random(small_space, point, seed=0)
        assert filled[:2].tolist() == [0.3, -0.4]
        assert 0.0 <= filled[2] <= 10.0
        np.testing.assert_array_equal(filled, fill_in_random(small_space, point, seed=0))
        twin = make_point(small_space, [1, 0.3, -0.4, 1.0])
        np.testing.assert_array_equal(filled, fill_in_random(small_space, twin, seed=0))
        assert filled[2] != fill_in_random(small_space, point, seed=1)[2]

    def test_feature_layout(self, small_space, rng):
        points = sample_points(small_space, 9, rng)
        features = random_fill_features(small_space, points, seed=0)
        assert features.shape == (9, 4)
        assert np.all((features >= 0.0) & (features <= 1.0))
        np.testing.assert_allclose(features[:, 0], [p.depth / 2 for p in points])
        assert random_fill_features(small_space, [], seed=0).shape == (0, 4)

    def test_relevant_features_single_depth(self, small_space, rng):
        with pytest.raises(ValueError):
            relevant_features(small_space, [with_depth(small_space, 0), with_depth(small_space, 1)])
        features = relevant_features(small_space, _depth_points(small_space, 1, 4, rng))
        assert features.shape == (4, 2)

    def test_ridge_matches_least_squares(self, rng):
        X = rng.normal(size=(30, 3))
        y = X @ np.array([1.0, -2.0, 0.5]) + 0.3 + 0.01 * rng.normal(size=30)
        X_test = rng.normal(size=(5, 3))
        design = np.column_stack([np.ones(30), X])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        expected = np.column_stack([np.ones(5), X_test]) @ coef
        np.testing.assert_allclose(ridge_predict(X, y, X_test), expected, atol=1e-5)

    def test_linear_baseline_needs_enough_rows(self, small_space, rng):
        points = sample_points(small_space, 4, rng)
        with pytest.raises(ValueError):
            linear_baseline(small_space, points, np.ones(4), points)


class TestMetrics:
    def test_nmse_examples(self):
        actual = np.array([1.0, 2.0, 3.0, 6.0])
        assert nmse(actual, actual) == 0.0
        assert nmse(np.full(4, actual.mean()), actual) == pytest.approx(1.0)
        assert nmse(2 * actual.mean() - actual, actual) == pytest.approx(4.0)

    @pytest.mark.parametrize(
        "predictions,actuals", [([], []), ([1.0], [1.0, 2.0]), ([1.0, 2.0], [3.0, 3.0])]
    )
    def test_nmse_undefined(self, predictions, actuals):
        with pytest.raises(MetricError):
            nmse(predictions, actuals)

    def test_mean_and_sd(self):
        assert mean_and_sd([1.0, 2.0, 3.0]) == {"mean": 2.0, "sd": 1.0}
        assert mean_and_sd([5.0]) == {"mean": 5.0, "sd": 0.0}


class TestRegistry:
    def test_registered_models(self):
        assert set(BenchRegistry.list_components("surrogate_model")) == {
            "arc_gp",
            "arc_gp_separate",
            "plain_gp_random_fill",
            "plain_gp_separate",
            "linear_regression",
        }
        assert set(BenchRegistry.list_components("bo_arm")) == {"arc_gp", "random_fill", "random_search"}

    def test_create_filters_kwargs(self):
        class Widget:
            def __init__(self, size):
                self.size = size

        registry = ComponentRegistry("widget")
        registry.register("w", Widget)
        assert registry.create("w", size=3, colour="red").size == 3

    def test_unknown_component(self):
        with pytest.raises(UnknownComponentError):
            BenchRegistry.registry("surrogate_model").create("svm")


class TestRegressionModels:
    def test_separate_model_falls_back_for_unseen_depth(self, small_space, rng):
        points = _depth_points(small_space, 0, 6, rng) + _depth_points(small_space, 1, 6, rng)
        values = np.array([0.1 * i for i in range(12)])
        model = ArcGpSeparateModel(small_space, settings=FAST_MAP).fit(points, values)
        mean, var = model.predict(_depth_points(small_space, 2, 3, rng))
        np.testing.assert_allclose(mean, values.mean())
        np.testing.assert_array_equal(var, 0.0)

    def test_separate_models_are_independent_across_depths(self, small_space, rng):
        shallow = _depth_points(small_space, 0, 6, rng)
        deeper = _depth_points(small_space, 1, 6, rng)
        tests = _depth_points(small_space, 0, 4, rng)
        shallow_values = np.linspace(0.0, 1.0, 6)
        predictions = []
        for deeper_values in (np.zeros(6), rng.normal(size=6)):
            model = PlainGpSeparateModel(small_space, settings=FAST_MAP)
            model.fit(shallow + deeper, np.concatenate([shallow_values, deeper_values]))
            predictions.append(model.predict(tests)[0])
        np.testing.assert_array_equal(predictions[0], predictions[1])

    def test_fill_seed_matters_only_for_random_fill(self, small_space, rng):
        points = sample_points(small_space, 15, rng)
        values = np.array([p.values[0] + 0.1 * p.depth for p in points])
        tests = [with_depth(small_space, 0), with_depth(small_space, 1)]

        def predictions(model_class, fill_seed):
            model = model_class(small_space, settings=FAST_MAP, fill_seed=fill_seed)
            return model.fit(points, values).predict(tests)[0]

        assert not np.array_equal(predictions(PlainGpRandomFillModel, 0), predictions(PlainGpRandomFillModel, 1))
        np.testing.assert_array_equal(predictions(ArcGpModel, 0), predictions(ArcGpModel, 1))

    @pytest.mark.slow
    def test_arc_gp_beats_the_mean(self, objective):
        train_points, train_values = generate_dataset(objective, 60, seed=0)
        test_points, test_values = generate_dataset(objective, 40, seed=1)
        model = ArcGpModel(objective.space, settings=FAST_MAP).fit(train_points, train_values)
        assert nmse(model.predict(test_points)[0], test_values) < 1.0


class RecordingSubscriber(EventSubscriber):
    def __init__(self):
        super().__init__()
        self.events = []

    def handle_event(self, event):
        self.events.append(event)


class TestRunEvents:
    def test_metrics_are_collected_per_run(self):
        context = RunContext("run-a")
        context.record_metric("step", "nmse", 0.5)
        context.record_metric("step", "nmse", 0.25)
        assert context.metric_values("nmse") == [0.5, 0.25]
        assert RunContext("run-b").metric_values("nmse") == []

    def test_step_timing_records_end(self):
        context = RunContext("timed")

        @step_timing("work")
        def work(ctx, x):
            return x + 1

        assert work(context, 1) == 2
        durations = RunEventManager().metrics_collector.get_step_durations("timed")
        assert len(durations["work"]) == 1 and durations["work"][0] >= 0.0

    def test_step_timing_records_errors(self):
        recorder = RecordingSubscriber()
        RunEventManager().register_subscriber(recorder)

        @step_timing("explode")
        def explode(context=None):
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            explode(context=RunContext("failing"))
        errors = [e for e in recorder.events if e["event_type"] == "error"]
        assert errors[0]["step"] == "explode" and errors[0]["error_type"] == "RuntimeError"

    def test_untimed_without_context(self):
        @step_timing("plain")
        def plain(x):
            return 2 * x

        assert plain(4) == 8

    def test_manager_is_a_singleton(self):
        assert RunEventManager() is RunEventManager()


def _tiny_regression() -> RegressionExperimentConfig:
    return RegressionExperimentConfig(
        models=["plain_gp_separate", "linear_regression"],
        folds=2,
        n_points=60,
        seeds=[0],
        inference=InferenceSettings(method="map", map_restarts=1),
        max_workers=1,
    )


def _tiny_bo(**overrides) -> BoExperimentConfig:
    fields = dict(seeds=[0, 1], budget=10, init_count=10, grid_size=64, max_workers=1)
    fields.update(overrides)
    return BoExperimentConfig(**fields)


class TestRegressionExperiment:
    def test_deterministic_and_written(self, tmp_path):
        context = RunContext("regress-test")
        first = run_regression_experiment(_tiny_regression(), context=context)
        second = run_regression_experiment(_tiny_regression())
        pd.testing.assert_frame_equal(first.folds, second.folds)
        assert first.folds["model"].tolist() == ["plain_gp_separate"] * 2 + ["linear_regression"] * 2
        assert first.summary["model"].tolist() == ["plain_gp_separate", "linear_regression"]
        assert np.all(first.folds["nmse"] >= 0.0)
        assert len(context.metric_values("nmse/plain_gp_separate")) == 2

        paths = write_regression_results(first, str(tmp_path))
        assert [os.path.basename(p) for p in paths] == list(REGRESSION_OUTPUTS)
        assert len(pd.read_csv(paths[0])) == 4

    def test_fold_failure_is_an_experiment_error(self):
        cfg = _tiny_regression().model_copy(update={"models": ["linear_regression"], "n_points": 20})
        with pytest.raises(ExperimentError):
            run_regression_experiment(cfg)


class TestBoExperiment:
    def test_initial_design_only(self, tmp_path):
        results = run_bo_experiment(_tiny_bo())
        assert len(results.trajectories) == 3 * 2 * 10
        assert results.summary["model"].tolist() == ["arc_gp", "random_fill", "random_search"]
        # Without model-driven iterations every arm walks the same grid head
        assert results.summary["final_incumbent_median"].nunique() == 1
        counts = results.architectures.groupby("model")["count"].sum()
        assert counts.tolist() == [20, 20, 20]
        assert len(results.architectures) == 3 * 6
        for arm, group in results.trajectories.groupby("model"):
            deep = float(np.mean(group["depth"] >= 3))
            row = results.summary[results.summary["model"] == arm].iloc[0]
            assert row["deep_fraction"] == pytest.approx(deep)

        paths = write_bo_results(results, str(tmp_path))
        assert [os.path.basename(p) for p in paths[:3]] == list(BO_OUTPUTS)
        assert len(paths) == 3 + 6
        assert all(os.path.exists(p) for p in paths)

    def test_model_iterations_are_reproducible(self):
        cfg = _tiny_bo(
            budget=12,
            inference=InferenceSettings(method="slice", n_samples=2, burn_in=3, thin=1, refresh_burn_in=1),
        )
        for arm in ("arc_gp", "random_fill"):
            a, b = run_seed(cfg, arm, 0), run_seed(cfg, arm, 0)
            assert len(a.history) == 12
            pd.testing.assert_frame_equal(a.history, b.history)

    def test_grid_smaller_than_budget(self):
        with pytest.raises(ExperimentError):
            run_bo_experiment(_tiny_bo(grid_size=5, init_count=5))
