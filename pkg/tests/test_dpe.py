"""The semiparametric density-product sampler."""

import numpy as np
import pytest

from chaincombine import (
    DpeConfig,
    NonPositiveBandwidth,
    bandwidth_schedule,
    semiparametric_dpe,
    validate_bundle,
)
from chaincombine.combiners import _DpeContext
from chaincombine.harness import gaussian_product_oracle


def gaussian_bundle(rng, d, T, M, scale=0.01):
    """Machines that look like subposteriors of one tight Gaussian posterior:
    per-machine covariance ~ M * scale^2, machine means scattered by a
    fraction of the machine spread.  Returns (bundle, oracle mean, oracle cov).
    """
    means, covs, draws = [], [], []
    for _ in range(M):
        a = rng.standard_normal((d, d))
        cov = (scale**2) * M * (a @ a.T / d + np.eye(d))
        mean = rng.normal(0.0, 0.3 * scale * np.sqrt(M), size=d)
        chol = np.linalg.cholesky(cov)
        draws.append(mean[:, None] + chol @ rng.standard_normal((d, T)))
        means.append(mean)
        covs.append(cov)
    bundle = validate_bundle(np.stack(draws, axis=2))
    mean_star, cov_star = gaussian_product_oracle(means, covs)
    return bundle, mean_star, cov_star


class TestBandwidthSchedule:
    def test_annealed_values_d1(self):
        assert bandwidth_schedule(1, 1, [1.0])[0] == 1.0
        np.testing.assert_allclose(bandwidth_schedule(32, 1, [1.0])[0], 0.5, atol=1e-12)

    def test_no_anneal_is_constant(self):
        for step in (1, 7, 5000):
            np.testing.assert_array_equal(
                bandwidth_schedule(step, 3, [0.7, 1.0, 2.0], anneal=False),
                [0.7, 1.0, 2.0],
            )

    def test_exponent_uses_dimension(self):
        # d = 3 gives t^(-1/7).
        np.testing.assert_allclose(
            bandwidth_schedule(128, 3, [1.0])[0], 128.0 ** (-1.0 / 7.0), rtol=1e-15
        )

    def test_starting_vector_scales_componentwise(self):
        out = bandwidth_schedule(32, 1, [1.0, 2.0], anneal=True)
        np.testing.assert_allclose(out, [0.5, 1.0], atol=1e-12)


class TestConfig:
    def test_default_bandwidths_are_ones(self):
        np.testing.assert_array_equal(DpeConfig().resolved_bandwidths(4), np.ones(4))

    def test_scalar_broadcasts(self):
        np.testing.assert_array_equal(
            DpeConfig(bandw=0.5).resolved_bandwidths(3), [0.5, 0.5, 0.5]
        )

    def test_nonpositive_bandwidth_rejected(self):
        with pytest.raises(NonPositiveBandwidth):
            DpeConfig(bandw=[1.0, 0.0]).resolved_bandwidths(2)
        with pytest.raises(NonPositiveBandwidth):
            DpeConfig(bandw=-1.0).resolved_bandwidths(2)

    def test_wrong_length_rejected(self):
        with pytest.raises(NonPositiveBandwidth):
            DpeConfig(bandw=[1.0, 1.0]).resolved_bandwidths(3)


class TestSampler:
    def test_deterministic_given_seed(self):
        rng = np.random.default_rng(0)
        bundle, _, _ = gaussian_bundle(rng, 2, 300, 3)
        a = semiparametric_dpe(bundle, DpeConfig(seed=5))
        b = semiparametric_dpe(bundle, DpeConfig(seed=5))
        np.testing.assert_array_equal(a.values, b.values)

    def test_output_shape_matches_input(self):
        rng = np.random.default_rng(1)
        bundle, _, _ = gaussian_bundle(rng, 2, 250, 4)
        out = semiparametric_dpe(bundle, DpeConfig(seed=2))
        assert out.values.shape == (2, 250)
        assert np.isfinite(out.values).all()

    def test_single_machine_small_bandwidth_is_near_bootstrap(self):
        # With one machine and a bandwidth well below the sample spread the
        # estimator resamples the input draws, so first and second moments
        # come back within a few percent.
        rng = np.random.default_rng(2)
        draws = 10.0 + 2.0 * rng.standard_normal((1, 2000, 1))
        bundle = validate_bundle(draws)
        bandw = 0.05 * draws.std()
        out = semiparametric_dpe(bundle, DpeConfig(bandw=bandw, anneal=False, seed=3))
        assert abs(out.values.mean() - draws.mean()) < 0.05 * abs(draws.mean())
        assert abs(out.values.std() - draws.std()) < 0.05 * draws.std()

    def test_gaussian_product_moments_quick(self):
        # Smaller sibling of the acceptance criterion: mean within 5 combined
        # standard errors, covariance within 15% Frobenius.
        rng = np.random.default_rng(3)
        T = 4000
        bundle, mean_star, cov_star = gaussian_bundle(rng, 3, T, 5, scale=0.005)
        out = semiparametric_dpe(bundle, DpeConfig(seed=4))
        se = np.sqrt(2.0 * np.diag(cov_star) / T)
        assert np.all(np.abs(out.values.mean(axis=1) - mean_star) < 5.0 * se)
        sample_cov = np.cov(out.values, ddof=1)
        rel = np.linalg.norm(sample_cov - cov_star) / np.linalg.norm(cov_star)
        assert rel < 0.15


class TestChainState:
    def test_incremental_state_matches_recomputation(self):
        rng = np.random.default_rng(4)
        bundle, _, _ = gaussian_bundle(rng, 2, 400, 4)
        config = DpeConfig(seed=6)
        out, state = semiparametric_dpe(bundle, config, return_state=True)
        ctx = _DpeContext(bundle)
        rebuilt = ctx.state_from_indices(state.indices, state.bandwidth)
        np.testing.assert_allclose(rebuilt.theta_bar, state.theta_bar, rtol=1e-12)
        np.testing.assert_allclose(rebuilt.log_w, state.log_w, rtol=1e-9)
        np.testing.assert_allclose(rebuilt.log_weight, state.log_weight, rtol=1e-9)
        np.testing.assert_allclose(
            rebuilt.component_mean, state.component_mean, rtol=1e-9
        )
        np.testing.assert_allclose(
            rebuilt.component_cov, state.component_cov, rtol=1e-8
        )

    def test_theta_bar_is_mean_of_selected_draws(self):
        rng = np.random.default_rng(5)
        bundle, _, _ = gaussian_bundle(rng, 3, 200, 5)
        _, state = semiparametric_dpe(bundle, DpeConfig(seed=7), return_state=True)
        selected = bundle.values[:, state.indices, np.arange(bundle.M)]
        np.testing.assert_allclose(
            state.theta_bar, selected.mean(axis=1), rtol=1e-12
        )

    def test_fixed_bandwidth_state_recomputes_too(self):
        rng = np.random.default_rng(6)
        bundle, _, _ = gaussian_bundle(rng, 2, 300, 3)
        config = DpeConfig(anneal=False, seed=8)
        _, state = semiparametric_dpe(bundle, config, return_state=True)
        rebuilt = _DpeContext(bundle).state_from_indices(state.indices, state.bandwidth)
        np.testing.assert_allclose(rebuilt.theta_bar, state.theta_bar, rtol=1e-12)
        np.testing.assert_allclose(rebuilt.log_weight, state.log_weight, rtol=1e-9)


class TestAcceptanceRatio:
    def test_common_log_constant_cancels(self):
        # The accept/reject step uses only the difference of log weights, so
        # shifting every log density by a shared baseline changes nothing up
        # to float cancellation noise.
        rng = np.random.default_rng(7)
        log_cur = rng.normal(-50.0, 30.0, size=500)
        log_prop = rng.normal(-50.0, 30.0, size=500)
        for baseline in (1e3, -1e6):
            shifted = (log_prop + baseline) - (log_cur + baseline)
            np.testing.assert_allclose(shifted, log_prop - log_cur, atol=1e-8)

    def test_denominator_baseline_shift_cancels_in_ratio(self):
        rng = np.random.default_rng(8)
        bundle, _, _ = gaussian_bundle(rng, 2, 100, 3)
        ctx = _DpeContext(bundle)
        hsq = np.ones(2)
        chol_w = ctx.compat_cholesky(hsq)
        idx_a = np.array([0, 1, 2])
        idx_b = np.array([3, 1, 2])
        states = []
        for idx in (idx_a, idx_b):
            sel = ctx.selected_draws(idx)
            bar = sel.mean(axis=1)
            fit = ctx.log_fit[idx, np.arange(3)].sum()
            states.append((sel, bar, fit))
        baseline = 123.456
        deltas = []
        for shift in (0.0, baseline):
            weights = [
                ctx.log_mixture_weight(sel, bar, fit + shift, hsq, chol_w)[1]
                for sel, bar, fit in states
            ]
            deltas.append(weights[1] - weights[0])
        np.testing.assert_allclose(deltas[0], deltas[1], atol=1e-9)
