import math

import numpy as np
import pytest
from scipy import stats

from vexp import (
    CepstralModel,
    Chain,
    PriorConfig,
    SsvsConfig,
    SsvsState,
    fit_mle,
    FitConfig,
    inclusion_frequencies,
    log_posterior,
    log_posterior_parts,
    mcmc_run,
    model_from_state,
    posterior_summary,
    simulate,
    ssvs_log_prior,
)
from vexp.bayes import _GibbsSampler

from oracles import sorted_quantile


def make_state(m, q, rng=None, **overrides):
    rng = rng or np.random.default_rng(0)
    n0 = m * (m + 1) // 2
    state = SsvsState(
        v=rng.normal(scale=0.3, size=q * m * m),
        gamma=np.ones(q * m * m, dtype=np.int8),
        omega0=rng.normal(scale=0.2, size=n0),
        gamma_omega0=np.ones(m * (m - 1) // 2, dtype=np.int8),
        delta=np.zeros(m),
        var_mu=np.ones(m),
        var_omega0=np.ones(m),
    )
    for key, val in overrides.items():
        setattr(state, key, np.asarray(val))
    return state


class TestSsvsPrior:
    def test_spike_density_at_origin(self):
        cfg = SsvsConfig(tau=0.1, c=10.0, pi=0.5)
        expected = -0.5 * math.log(2 * math.pi * 0.01) + math.log(0.5)
        assert np.isclose(ssvs_log_prior(0.0, 0, cfg), expected, rtol=1e-12)

    def test_slab_sd_is_c_times_tau(self):
        cfg = SsvsConfig(tau=0.1, c=10.0)
        assert cfg.slab_sd == 1.0
        expected = -0.5 * math.log(2 * math.pi * 1.0) + math.log(0.5)
        assert np.isclose(ssvs_log_prior(0.0, 1, cfg), expected, rtol=1e-12)

    def test_mixture_marginal(self):
        cfg = SsvsConfig(tau=0.1, c=10.0, pi=0.5)
        for v in (0.0, 0.05, 0.4):
            marginal = math.exp(ssvs_log_prior(v, 0, cfg)) + \
                math.exp(ssvs_log_prior(v, 1, cfg))
            direct = 0.5 * (
                stats.norm.pdf(v, scale=0.1) + stats.norm.pdf(v, scale=1.0)
            )
            assert np.isclose(marginal, direct, rtol=1e-10)

    def test_config_validation(self):
        with pytest.raises(ValueError, match="c"):
            SsvsConfig(c=0.5)
        with pytest.raises(ValueError, match="tau"):
            SsvsConfig(tau=0.0)
        with pytest.raises(ValueError, match="pi"):
            SsvsConfig(pi=1.0)
        with pytest.raises(ValueError, match="positive"):
            PriorConfig(ig_b=-1.0)
        with pytest.warns(UserWarning, match="variance"):
            PriorConfig(ig_a=1.5)


class TestLogPosterior:
    def test_sign_flip_changes_only_likelihood(self):
        rng = np.random.default_rng(51)
        x = rng.normal(size=(40, 2))
        state = make_state(2, 1, rng)
        flipped = state.copy()
        flipped.v = -state.v
        flipped.omega0 = state.omega0.copy()
        p1 = log_posterior_parts(state, x, 1)
        p2 = log_posterior_parts(flipped, x, 1)
        assert np.isclose(p1["v_prior"], p2["v_prior"], rtol=1e-12)
        assert np.isclose(p1["omega0_prior"], p2["omega0_prior"], rtol=1e-12)
        d1 = log_posterior(state, x, 1) - log_posterior(flipped, x, 1)
        d2 = p1["loglik"] - p2["loglik"]
        assert np.isclose(d1, d2, rtol=1e-10)

    def test_delta_change_touches_two_terms(self):
        rng = np.random.default_rng(52)
        x = rng.normal(size=(30, 2))
        state = make_state(2, 1, rng)
        moved = state.copy()
        moved.delta = state.delta + np.array([0.3, -0.2])
        p1 = log_posterior_parts(state, x, 1)
        p2 = log_posterior_parts(moved, x, 1)
        assert p1["v_prior"] == p2["v_prior"]
        assert p1["omega0_prior"] == p2["omega0_prior"]
        assert p1["variance_prior"] == p2["variance_prior"]
        assert p1["loglik"] != p2["loglik"]
        assert p1["delta_prior"] != p2["delta_prior"]

    def test_flat_prior_slice_matches_mle(self):
        true = CepstralModel(np.zeros((2, 2)),
                             (np.array([[0.4, 0.0], [0.2, 0.3]]),))
        panel = simulate(true, T=120, seed=31, trunc=26)
        fit = fit_mle(panel, 1, FitConfig(compute_std_errors=False))
        x = panel.values
        ssvs = SsvsConfig(tau=50.0, c=2.0)  # essentially flat over the grid
        grid = np.linspace(fit.params[3] - 0.3, fit.params[3] + 0.3, 61)

        from vexp import gaussian_deviance, model_from_params

        def state_at(val):
            theta = fit.params.copy()
            theta[3] = val
            model = model_from_params(theta, 2, 1)
            state = make_state(2, 1)
            state.omega0 = theta[:3].copy()
            state.v = theta[3:].copy()
            state.delta = fit.mean.copy()
            return state, model

        post_vals, lik_vals = [], []
        for val in grid:
            state, model = state_at(val)
            post_vals.append(log_posterior(state, x, 1, ssvs=ssvs))
            lik_vals.append(
                -0.5 * gaussian_deviance(model, x - fit.mean, method="banded")
            )
        step = grid[1] - grid[0]
        assert abs(grid[np.argmax(post_vals)] - grid[np.argmax(lik_vals)]) <= step

    def test_singular_state_is_rejected(self):
        x = np.random.default_rng(53).normal(size=(20, 2))
        state = make_state(2, 1)
        state.omega0 = np.array([800.0, 0.0, 800.0])  # overflow covariance
        assert log_posterior(state, x, 1) == -np.inf

    def test_model_from_state_layout(self):
        state = make_state(2, 1)
        state.v = np.array([1.0, 2.0, 3.0, 4.0])
        state.omega0 = np.array([0.5, 0.25, -0.5])
        model = model_from_state(state, 2, 1)
        assert np.allclose(model.omegas[0], [[1.0, 3.0], [2.0, 4.0]])
        assert np.allclose(model.omega0, [[0.5, 0.25], [0.25, -0.5]])


class TestSamplerMechanics:
    def test_bit_reproducible(self):
        panel = simulate(CepstralModel(np.zeros((2, 2)),
                                       (np.diag([0.3, 0.2]),)),
                         T=50, seed=32, trunc=26)
        a = mcmc_run(panel, 1, iterations=50, burn_in=20, seed=77)
        b = mcmc_run(panel, 1, iterations=50, burn_in=20, seed=77)
        for field in ("v_draws", "gamma_draws", "omega0_draws",
                      "gamma_omega0_draws", "delta_draws", "var_mu_draws",
                      "var_omega0_draws"):
            assert np.array_equal(getattr(a, field), getattr(b, field))

    def test_cached_loglik_matches_fresh_evaluation(self):
        panel = simulate(CepstralModel(np.zeros((2, 2)),
                                       (np.diag([0.4, 0.1]),)),
                         T=60, seed=33, trunc=26)
        x = panel.values
        sampler = _GibbsSampler(x, 1, PriorConfig(), SsvsConfig(), 26,
                                "gaussian", 5, 0.1, 100)
        for _ in range(15):
            sampler._update_v(True)
            sampler._update_omega0(True)
            sampler._update_delta()
            sampler._update_variances()
        state = SsvsState(
            v=sampler.v.copy(), gamma=sampler.gamma.copy(),
            omega0=sampler.e0.copy(), gamma_omega0=sampler.gamma_off.copy(),
            delta=sampler.delta.copy(), var_mu=sampler.var_mu.copy(),
            var_omega0=sampler.var_omega0.copy(),
        )
        fresh = log_posterior_parts(state, x, 1, trunc=26)["loglik"]
        assert np.isclose(sampler.loglik, fresh, rtol=1e-10)

    def test_whittle_likelihood_consistent(self):
        panel = simulate(CepstralModel(np.zeros((2, 2)),
                                       (np.diag([0.4, 0.1]),)),
                         T=50, seed=34, trunc=26)
        x = panel.values
        sampler = _GibbsSampler(x, 1, PriorConfig(), SsvsConfig(), 26,
                                "whittle", 5, 0.1, 100)
        for _ in range(10):
            sampler._update_v(True)
            sampler._update_omega0(True)
            sampler._update_delta()
            sampler._update_variances()
        state = SsvsState(
            v=sampler.v.copy(), gamma=sampler.gamma.copy(),
            omega0=sampler.e0.copy(), gamma_omega0=sampler.gamma_off.copy(),
            delta=sampler.delta.copy(), var_mu=sampler.var_mu.copy(),
            var_omega0=sampler.var_omega0.copy(),
        )
        fresh = log_posterior_parts(state, x, 1, trunc=26,
                                    likelihood="whittle")["loglik"]
        assert np.isclose(sampler.loglik, fresh, rtol=1e-10)

    def test_iteration_validation(self):
        panel = simulate(CepstralModel(np.zeros((1, 1))), T=20, seed=1)
        with pytest.raises(ValueError, match="exceed"):
            mcmc_run(panel, 1, iterations=10, burn_in=10)
        with pytest.raises(ValueError, match="likelihood"):
            mcmc_run(panel, 1, iterations=10, burn_in=5, likelihood="huber")


class TestPriorRecovery:
    def test_inclusion_rate_matches_prior(self):
        panel = simulate(CepstralModel(np.zeros((1, 1)),
                                       (np.zeros((1, 1)),)), T=20, seed=35)
        for pi in (0.5, 0.3):
            chain = mcmc_run(panel, 1, iterations=50000, burn_in=2000,
                             seed=37, likelihood="none",
                             ssvs=SsvsConfig(pi=pi))
            rate = chain.gamma_draws[chain.retained_indices()].mean()
            assert abs(rate - pi) < 0.02

    def test_rw_kernel_recovers_gaussian_target(self):
        # with the likelihood off and the mixture disabled, the coefficient
        # chain targets its N(0, sigma_v^2) prior through the MH kernel
        panel = simulate(CepstralModel(np.zeros((1, 1)),
                                       (np.zeros((1, 1)),)), T=20, seed=37)
        sigma_v = 2.0
        chain = mcmc_run(panel, 1, iterations=30000, burn_in=5000, seed=38,
                         likelihood="none",
                         ssvs=SsvsConfig(enabled=False),
                         priors=PriorConfig(sigma_v=sigma_v))
        draws = chain.v_draws[chain.retained_indices(), 0]
        batches = draws.reshape(25, -1).mean(axis=1)
        mcse_mean = batches.std(ddof=1) / np.sqrt(len(batches))
        assert abs(draws.mean()) < 3 * mcse_mean
        var_batches = (draws.reshape(25, -1) ** 2).mean(axis=1)
        mcse_var = var_batches.std(ddof=1) / np.sqrt(len(var_batches))
        assert abs(draws.var() - sigma_v ** 2) < 3 * mcse_var + 0.05

    def test_variance_gibbs_matches_inverse_gamma(self):
        panel = simulate(CepstralModel(np.zeros((2, 2))), T=30, seed=39)
        priors = PriorConfig(ig_a=2.1, ig_b=1.1)
        sampler = _GibbsSampler(panel.values, 1, priors, SsvsConfig(), 26,
                                "none", 40, 0.1, 100)
        sampler.delta = sampler.delta0.copy()  # conditioning fixed at b = B
        draws = np.empty(2000)
        for i in range(2000):
            sampler._update_variances()
            draws[i] = sampler.var_mu[0]
        ref = stats.invgamma(priors.ig_a + 0.5, scale=priors.ig_b)
        ks = stats.kstest(draws, ref.cdf)
        assert ks.pvalue > 0.01


class TestPosteriorInference:
    def test_small_run_covers_truth(self):
        true = CepstralModel(np.array([[0.3, 0.1], [0.1, -0.4]]),
                             (np.array([[0.5, 0.0], [-0.8, 0.3]]),))
        panel = simulate(true, T=150, seed=40, trunc=26)
        chain = mcmc_run(panel, 1, iterations=2500, burn_in=1200, seed=41)
        rows = {r["param"]: r for r in posterior_summary(chain)}
        truth = {"omega0(1,1)": 0.3, "omega0(2,1)": 0.1, "omega0(2,2)": -0.4,
                 "omega1(1,1)": 0.5, "omega1(2,1)": -0.8, "omega1(1,2)": 0.0,
                 "omega1(2,2)": 0.3, "mu(1)": 0.0, "mu(2)": 0.0}
        covered = sum(
            rows[k]["q0.025"] <= v <= rows[k]["q0.975"]
            for k, v in truth.items()
        )
        assert covered >= 7
        rates = np.concatenate([chain.acceptance["v"],
                                chain.acceptance["omega0"]])
        assert np.all(rates > 0.02) and np.all(rates < 0.95)


class TestChainSummaries:
    def _tiny_chain(self):
        n, m, q = 6, 2, 1
        return Chain(
            m=m, q=q,
            v_draws=np.arange(n * 4, dtype=float).reshape(n, 4),
            gamma_draws=np.array(
                [[1, 1, 0, 1]] * 4 + [[1, 1, 1, 1]] * 2, dtype=np.int8),
            omega0_draws=np.zeros((n, 3)),
            gamma_omega0_draws=np.array([[1]] * 5 + [[0]], dtype=np.int8),
            delta_draws=np.zeros((n, m)),
            var_mu_draws=np.ones((n, m)),
            var_omega0_draws=np.ones((n, m)),
            burn_in=2, seed=0, acceptance={},
        )

    def test_pattern_counts(self):
        chain = self._tiny_chain()
        inc = inclusion_frequencies(chain)
        assert inc["patterns"]["omega1"] == {"1101": 2, "1111": 2}
        assert sum(inc["patterns"]["omega1"].values()) == 4
        assert inc["patterns"]["omega0_offdiag"] == {"1": 3, "0": 1}
        assert np.isclose(inc["rates"]["omega1(1,2)"], 0.5)
        assert np.isclose(inc["rates"]["omega0(2,1)"], 0.75)

    def test_all_included(self):
        chain = self._tiny_chain()
        chain.gamma_draws[:] = 1
        inc = inclusion_frequencies(chain)
        assert all(np.isclose(r, 1.0) for k, r in inc["rates"].items()
                   if k.startswith("omega1"))

    def test_summary_constant_chain(self):
        chain = self._tiny_chain()
        chain.v_draws[:] = 3.25
        rows = {r["param"]: r for r in posterior_summary(chain)}
        row = rows["omega1(1,1)"]
        assert row["sd"] == 0.0
        assert row["mean"] == row["q0.025"] == row["q0.5"] == row["q0.975"] == 3.25

    def test_summary_quantiles_match_sort_oracle(self):
        rng = np.random.default_rng(54)
        chain = self._tiny_chain()
        chain.v_draws[:, 0] = rng.normal(size=6)
        rows = {r["param"]: r for r in posterior_summary(chain)}
        retained = chain.v_draws[2:, 0]
        for q in (0.025, 0.5, 0.975):
            assert np.isclose(rows["omega1(1,1)"][f"q{q:g}"],
                              sorted_quantile(retained, q), rtol=1e-12)

    def test_row_set_matches_expected_layout(self):
        panel = simulate(sparse_model_for_layout(), T=40, seed=42, trunc=29)
        chain = mcmc_run(panel, 4, iterations=12, burn_in=4, seed=3)
        rows = posterior_summary(chain)
        labels = [r["param"] for r in rows]
        assert len(labels) == 25  # 21 model parameters + 4 hypervariances
        assert labels[:3] == ["omega0(1,1)", "omega0(2,1)", "omega0(2,2)"]
        assert labels[3:7] == ["omega1(1,1)", "omega1(2,1)",
                               "omega1(1,2)", "omega1(2,2)"]
        assert labels[19:21] == ["mu(1)", "mu(2)"]
        assert labels[21:] == ["sigma2(1)", "sigma2(2)",
                               "sigma2_mu(1)", "sigma2_mu(2)"]

    def test_burn_in_validation(self):
        chain = self._tiny_chain()
        with pytest.raises(ValueError, match="burn_in"):
            Chain(**{**chain.__dict__, "burn_in": 6})


def sparse_model_for_layout():
    from reference_models import sparse_generator

    return sparse_generator()
