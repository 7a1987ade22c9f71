import math

import numpy as np
import pytest
from scipy.stats import norm

from vexp import (
    CepstralModel,
    acf_of_model,
    fit_var1_ols,
    forecast,
    forecast_filter,
    holdout_benchmark,
    innovation_covariance,
    mcmc_run,
    one_step_prediction,
    poly_mul_trunc,
    simulate,
    var1_forecast,
    wold_from_cepstral,
)

from reference_models import sparse_generator


class TestForecastFilter:
    def test_white_noise_unforecastable(self):
        model = CepstralModel(np.diag([0.3, -0.1]))
        for h in (1, 2, 6):
            filt = forecast_filter(model, h, trunc=20)
            assert not np.any(filt.coeffs)

    def test_order_one_closed_form(self):
        w1 = np.array([[0.4, -0.3], [0.2, 0.5]])
        model = CepstralModel(np.zeros((2, 2)), (w1,))
        for h in (1, 2, 5):
            filt = forecast_filter(model, h, trunc=40)
            for k in range(11):
                scalar = sum(
                    (-1.0) ** l / (math.factorial(l) * math.factorial(k + h - l))
                    for l in range(k + 1)
                )
                expected = scalar * np.linalg.matrix_power(w1, k + h)
                assert np.max(np.abs(filt.coeffs[k] - expected)) < 1e-10

    def test_filter_identity(self):
        # convolving the filter with the generating filter returns the tail
        rng = np.random.default_rng(61)
        model = CepstralModel(
            0.1 * np.eye(2),
            tuple(0.4 * rng.uniform(-1, 1, (2, 2)) for _ in range(2)),
        )
        h = 2
        psi = wold_from_cepstral(model, 40)
        filt = forecast_filter(model, h, trunc=40)
        prod = poly_mul_trunc(filt, psi, 20)
        assert np.max(np.abs(prod.coeffs - psi.coeffs[h:h + 21])) < 1e-8

    def test_long_horizon_decay(self):
        base = np.array([[0.55, 0.7], [-0.45, 0.35]])
        base /= np.linalg.norm(base, 2)
        model = CepstralModel(np.zeros((2, 2)),
                              tuple(0.5 ** k * base for k in range(1, 5)))
        filt = forecast_filter(model, 50, trunc=70)
        assert np.max(np.abs(filt.coeffs)) < 1e-8

    def test_horizon_validation(self):
        model = CepstralModel(np.zeros((2, 2)))
        with pytest.raises(ValueError, match="horizon"):
            forecast_filter(model, 0)
        with pytest.raises(ValueError, match="exceeds"):
            forecast_filter(model, 30, trunc=15)


class TestForecast:
    def test_white_noise_reverts_to_mean(self):
        model = CepstralModel(np.array([[0.4, 0.1], [0.1, -0.3]]))
        delta = np.array([1.5, -2.0])
        panel = simulate(model, delta=delta, T=50, seed=62, trunc=15)
        res = forecast(panel.values, model, delta=delta, h=6, coverage=0.95)
        for step in range(6):
            assert np.allclose(res.point[step], delta, atol=1e-10)
        z = norm.ppf(0.975)
        expected_hw = z * np.sqrt(np.diag(innovation_covariance(model)))
        assert np.allclose(res.half_width, expected_hw[None, :], atol=1e-10)

    def test_one_step_matches_levinson_predictor(self):
        model = sparse_generator()
        panel = simulate(model, T=64, seed=63, trunc=29)
        res = forecast(panel.values, model, delta=np.zeros(2), h=1, trunc=29)
        pred, _ = one_step_prediction(model, panel.values, trunc=29)
        assert np.max(np.abs(res.point[0] - pred)) < 1e-8

    def test_long_horizon_variance_reaches_lag0(self):
        rng = np.random.default_rng(64)
        model = CepstralModel(
            0.1 * np.eye(2), tuple(0.4 * rng.uniform(-1, 1, (2, 2))
                                   for _ in range(2)),
        )
        panel = simulate(model, T=40, seed=65, trunc=15)
        res = forecast(panel.values, model, delta=np.zeros(2), h=40,
                       coverage=0.95, trunc=15)
        z = norm.ppf(0.975)
        g0 = acf_of_model(model, 0, 15).gammas[0]
        final_var = (res.half_width[-1] / z) ** 2
        assert np.allclose(final_var, np.diag(g0), rtol=1e-8)

    def test_interval_monotone_in_horizon(self):
        rng = np.random.default_rng(66)
        for _ in range(3):
            model = CepstralModel(
                0.1 * np.eye(2),
                tuple(0.5 * rng.uniform(-1, 1, (2, 2)) for _ in range(2)),
            )
            panel = simulate(model, T=60, seed=int(rng.integers(1e6)), trunc=26)
            res = forecast(panel.values, model, delta=np.zeros(2), h=12)
            assert np.all(np.diff(res.half_width, axis=0) >= -1e-9)

    def test_posterior_predictive_widens_intervals(self):
        model = CepstralModel(np.zeros((2, 2)), (np.diag([0.4, 0.2]),))
        panel = simulate(model, T=80, seed=67, trunc=26)
        chain = mcmc_run(panel, 1, iterations=400, burn_in=200, seed=5)
        plug = forecast(panel.values, chain.model(chain.total - 1),
                        delta=chain.delta_draws[-1], h=6)
        post = forecast(panel.values, None, h=6, chain=chain, max_draws=50)
        assert post.point.shape == (6, 2)
        # parameter uncertainty cannot shrink the average interval
        assert post.half_width.mean() > 0.8 * plug.half_width.mean()

    def test_validation(self):
        model = CepstralModel(np.zeros((2, 2)))
        with pytest.raises(ValueError, match="coverage"):
            forecast(np.zeros((10, 2)), model, h=2, coverage=1.2)
        with pytest.raises(ValueError, match="horizon"):
            forecast(np.zeros((10, 2)), model, h=0)


class TestSimulate:
    def test_zero_model_is_standard_noise(self):
        panel = simulate(CepstralModel(np.zeros((2, 2))), T=100000, seed=68)
        x = panel.values
        cov = x.T @ x / len(x)
        batches = x.reshape(50, -1, 2)
        cov_b = np.einsum("nta,ntc->nac", batches, batches) / batches.shape[1]
        se = cov_b.std(axis=0, ddof=1) / np.sqrt(50)
        assert np.all(np.abs(cov - np.eye(2)) < 3 * se + 1e-3)
        assert np.abs(x.mean(axis=0)).max() < 0.02

    def test_seed_determinism(self):
        model = sparse_generator()
        a = simulate(model, T=50, seed=69, trunc=29)
        b = simulate(model, T=50, seed=69, trunc=29)
        assert np.array_equal(a.values, b.values)
        c = simulate(model, T=50, seed=70, trunc=29)
        assert not np.array_equal(a.values, c.values)

    def test_long_run_moments_match_model_acf(self):
        model = sparse_generator()
        panel = simulate(model, T=100000, seed=71, trunc=29)
        x = panel.values
        acf = acf_of_model(model, 1, 29)
        batches = x[: 99000].reshape(50, -1, 2)
        g0_b = np.einsum("bta,btc->bac", batches, batches) / batches.shape[1]
        se0 = g0_b.std(axis=0, ddof=1) / np.sqrt(50)
        g0_hat = x.T @ x / len(x)
        assert np.all(np.abs(g0_hat - acf.gammas[0]) < 3 * se0 + 1e-2)
        g1_hat = x[1:].T @ x[:-1] / (len(x) - 1)
        g1_b = np.einsum("bta,btc->bac", batches[:, 1:], batches[:, :-1]) \
            / (batches.shape[1] - 1)
        se1 = g1_b.std(axis=0, ddof=1) / np.sqrt(50)
        assert np.all(np.abs(g1_hat - acf.gammas[1]) < 3 * se1 + 1e-2)

    def test_mean_added(self):
        delta = np.array([10.0, -5.0])
        panel = simulate(CepstralModel(np.zeros((2, 2))), delta=delta,
                         T=2000, seed=72)
        assert np.all(np.abs(panel.values.mean(axis=0) - delta) < 0.1)

    def test_burn_changes_nothing_for_finite_ma(self):
        model = sparse_generator()
        a = simulate(model, T=30, seed=73, trunc=29, burn=0)
        assert a.values.shape == (30, 2)
        b = simulate(model, T=30, seed=73, trunc=29, burn=10)
        assert b.values.shape == (30, 2)


class TestVar1:
    def test_ols_recovers_coefficients(self):
        rng = np.random.default_rng(74)
        phi = np.array([[0.5, 0.2], [-0.1, 0.3]])
        c = np.array([1.0, -0.5])
        x = np.zeros((3000, 2))
        for t in range(1, 3000):
            x[t] = c + phi @ x[t - 1] + 0.3 * rng.standard_normal(2)
        fit = fit_var1_ols(x)
        assert np.max(np.abs(fit.coef - phi)) < 0.05
        assert np.max(np.abs(fit.intercept - c)) < 0.05

    def test_forecast_iteration(self):
        from vexp import Var1Fit

        fit = Var1Fit(intercept=np.array([1.0, 0.0]),
                      coef=np.array([[0.5, 0.0], [0.0, 0.5]]),
                      resid_cov=np.eye(2))
        out = var1_forecast(fit, np.array([2.0, 4.0]), 3)
        assert np.allclose(out[0], [2.0, 2.0])
        assert np.allclose(out[1], [2.0, 1.0])
        assert np.allclose(out[2], [2.0, 0.5])

    def test_too_short_series(self):
        with pytest.raises(ValueError, match="observations"):
            fit_var1_ols(np.zeros((3, 2)))


def test_holdout_benchmark_structure():
    model = CepstralModel(np.array([[0.1, 0.0], [0.0, 0.1]]),
                          (np.array([[0.5, 0.0], [-0.6, 0.4]]),))
    panel = simulate(model, T=100, seed=75, trunc=26)
    from vexp import FitConfig

    res = holdout_benchmark(panel, 1, holdout=8,
                            fit_config=FitConfig(compute_std_errors=False))
    assert res["vexp_mspe"].shape == (2,)
    assert res["var1_mspe"].shape == (2,)
    assert res["vexp_total"] > 0 and res["var1_total"] > 0
