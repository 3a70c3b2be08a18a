import numpy as np
import pytest
from scipy import stats
from scipy.special import expit

from core.inference.priors import HyperParameterization, HyperPrior
from core.inference.slice_sampler import HyperState, slice_step, slice_sweep
from core.kernels.arc_kernel import ArcParams, PlainParams


def standard_normal(theta):
    return float(-0.5 * theta @ theta)


def unit_box(theta):
    return 0.0 if np.all((theta >= 0.0) & (theta <= 1.0)) else -np.inf


def run_chain(log_density, start, n, burn_in=200, thin=1, seed=0, **kwargs):
    state = HyperState.start(np.asarray(start, dtype=float), log_density, seed)
    for _ in range(burn_in):
        state = slice_sweep(state, log_density, **kwargs)
    draws = []
    for _ in range(n):
        for _ in range(thin):
            state = slice_sweep(state, log_density, **kwargs)
        draws.append(state.theta.copy())
    return np.array(draws), state


class TestCalibration:
    def test_standard_normal_moments(self):
        draws, _ = run_chain(standard_normal, [0.0], 10_000, width=1.0, max_stepout=10, seed=42)
        assert -0.05 <= draws.mean() <= 0.05
        assert 0.9 <= draws.var() <= 1.1

    def test_uniform_target(self):
        draws, _ = run_chain(unit_box, [0.5], 10_000, thin=2, width=1.0, max_stepout=10, seed=3)
        statistic = stats.kstest(draws[:, 0], "uniform").statistic
        assert statistic < 0.02

    def test_step_target_mass(self):
        mass = np.array([1.0, 2.0, 3.0, 4.0])
        mass /= mass.sum()

        def stepped(theta):
            x = theta[0]
            if not 0.0 <= x < 4.0:
                return -np.inf
            return float(np.log(mass[int(x)]))

        draws, _ = run_chain(stepped, [2.5], 50_000, width=1.0, max_stepout=10, seed=17)
        counts, _ = np.histogram(draws[:, 0], bins=4, range=(0.0, 4.0))
        assert 0.5 * np.sum(np.abs(counts / counts.sum() - mass)) < 0.03

    def test_two_dimensional_normal(self):
        draws, _ = run_chain(standard_normal, [3.0, -3.0], 4000, width=2.0, max_stepout=5, seed=9)
        np.testing.assert_allclose(draws.mean(axis=0), 0.0, atol=0.1)
        np.testing.assert_allclose(draws.var(axis=0), 1.0, atol=0.15)


class TestStep:
    def test_updates_one_coordinate(self):
        state = HyperState.start(np.array([0.1, 0.2, 0.3]), standard_normal, seed=0)
        new = slice_step(state, 1, standard_normal, width=1.0, max_stepout=5)
        assert new.theta[0] == 0.1 and new.theta[2] == 0.3
        assert new.theta[1] != 0.2

    def test_every_step_moves(self):
        state = HyperState.start(np.array([0.0]), standard_normal, seed=8)
        moved = 0
        for _ in range(1000):
            new = slice_step(state, 0, standard_normal, width=1.0, max_stepout=10)
            moved += int(new.theta[0] != state.theta[0])
            state = new
        assert moved / 1000 > 0.99

    def test_cached_density_is_consistent(self):
        _, state = run_chain(standard_normal, [0.0, 1.0], 50, burn_in=0, seed=1)
        assert state.consistent_with(standard_normal)

    def test_same_seed_same_chain(self):
        a, _ = run_chain(standard_normal, [0.0], 100, burn_in=0, seed=5)
        b, _ = run_chain(standard_normal, [0.0], 100, burn_in=0, seed=5)
        c, _ = run_chain(standard_normal, [0.0], 100, burn_in=0, seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_single_stepout_budget_still_samples(self):
        draws, _ = run_chain(standard_normal, [0.0], 500, burn_in=10, seed=2, width=4.0, max_stepout=1)
        assert np.all(np.isfinite(draws))

    def test_rejects_nonpositive_width(self):
        state = HyperState.start(np.zeros(1), standard_normal, seed=0)
        with pytest.raises(ValueError):
            slice_step(state, 0, standard_normal, width=0.0)

    def test_rejects_infinite_start(self):
        state = HyperState.start(np.array([2.0]), unit_box, seed=0)
        with pytest.raises(ValueError):
            slice_step(state, 0, unit_box, width=1.0)

    def test_sweep_restricted_axes(self):
        state = HyperState.start(np.array([0.5, 0.5]), standard_normal, seed=0)
        new = slice_sweep(state, standard_normal, width=1.0, max_stepout=5, axes=[1])
        assert new.theta[0] == 0.5


class TestPriors:
    def test_layout_sizes(self):
        assert HyperParameterization.for_params(ArcParams.default(3)).size == 8
        assert HyperParameterization.for_params(PlainParams(omega=np.ones(4))).size == 6

    def test_median_is_unit_scales_and_half_arcs(self):
        layout = HyperParameterization.for_params(ArcParams.default(2), noise_floor=1e-6)
        params, noise = layout.unpack(layout.median(HyperPrior()))
        assert params.omega.tolist() == [1.0, 1.0]
        assert params.rho.tolist() == [0.5, 0.5]
        assert params.amplitude == 1.0
        assert noise == pytest.approx(1.0 + 1e-6)

    def test_pack_inverts_unpack(self, rng):
        layout = HyperParameterization.for_params(ArcParams.default(3, "rq"))
        theta = rng.normal(size=layout.size)
        params, noise = layout.unpack(theta)
        assert params.alpha == 1.0
        np.testing.assert_allclose(layout.pack(params, noise), theta, rtol=1e-6, atol=1e-6)

    def test_unconstrained_density_includes_jacobian(self):
        prior = HyperPrior()
        for t in (-1.3, 0.0, 0.8):
            assert prior.log_positive(np.array([np.exp(t)])) + t == pytest.approx(stats.norm.logpdf(t))
        u = 0.7
        rho = expit(u)
        assert prior.log_extent_unconstrained(np.array([u])) == pytest.approx(np.log(rho * (1 - rho)))

    def test_log_prior_sums_parts(self, rng):
        layout = HyperParameterization.for_params(ArcParams.default(2))
        theta = rng.normal(size=layout.size)
        expected = np.sum(stats.norm.logpdf(theta[[0, 1, 4, 5]])) + np.sum(
            np.log(expit(theta[2:4]) * (1 - expit(theta[2:4])))
        )
        assert layout.log_prior(theta, HyperPrior()) == pytest.approx(expected)

    def test_prior_draws_have_uniform_extents(self):
        layout = HyperParameterization.for_params(ArcParams.default(1))
        rng = np.random.default_rng(11)
        rho = np.array([expit(layout.sample_prior(HyperPrior(), rng)[1]) for _ in range(4000)])
        assert stats.kstest(rho, "uniform").statistic < 0.035

    def test_out_of_support_densities(self):
        prior = HyperPrior()
        assert prior.log_positive(np.array([-1.0])) == -np.inf
        assert prior.log_extent(np.array([1.2])) == -np.inf
