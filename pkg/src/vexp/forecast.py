"""Multi-step forecasting, path simulation, and the VAR(1) OLS benchmark."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .cepstral import (
    DEFAULT_TRUNCATION,
    MatrixPolynomial,
    _wold_stack,
    innovation_covariance,
    poly_mul_trunc,
)
from .likelihood import (
    BandedCovariance,
    DataPanel,
    _as_values,
    _model_gamma_stack,
    default_truncation,
)

__all__ = [
    "ForecastResult",
    "Var1Fit",
    "forecast_filter",
    "forecast",
    "simulate",
    "fit_var1_ols",
    "var1_forecast",
    "holdout_benchmark",
]


@dataclass(frozen=True)
class ForecastResult:
    """Point forecasts and symmetric interval half-widths per step."""

    point: np.ndarray        # (h, m)
    half_width: np.ndarray   # (h, m)
    coverage: float

    @property
    def horizon(self):
        return self.point.shape[0]

    @property
    def lower(self):
        return self.point - self.half_width

    @property
    def upper(self):
        return self.point + self.half_width


def forecast_filter(model, h, trunc=DEFAULT_TRUNCATION):
    """h-step forecast filter from an infinite past.

    pi(z) = z^{-h} [psi]_h^inf(z) psi^{-1}(z), where the inverse Wold
    filter is the exponential of the sign-flipped cepstral polynomial
    (the polynomial commutes with its own negative).  Coefficients are
    returned through degree trunc - h.
    """
    if h < 1:
        raise ValueError("horizon h must be >= 1")
    if h > trunc:
        raise ValueError(f"horizon {h} exceeds truncation {trunc}")
    m = model.m
    psi = _wold_stack(model.omega_stack(), m, trunc)
    tail = MatrixPolynomial(psi[h:])
    neg = [-w for w in model.omegas]
    psi_inv = MatrixPolynomial(_wold_stack(np.array(neg) if neg else np.zeros((0, m, m)), m, trunc - h))
    return poly_mul_trunc(tail, psi_inv, trunc - h)


def _gamma_block(nz, lag):
    """gamma_lag with the sign convention gamma_{-h} = gamma_h'."""
    h = abs(lag)
    if h >= len(nz):
        return np.zeros_like(nz[0])
    return nz[h] if lag >= 0 else nz[h].T


def _conditional_forecast(model, x, h, trunc):
    """Exact conditional Gaussian mean and error covariance diagonal.

    x must already be mean-zero.  Solves against the banded observed
    covariance, so cost stays linear in T for fixed bandwidth.
    """
    T, m = x.shape
    nz = _model_gamma_stack(model, T + h - 1, trunc)
    fact = BandedCovariance(nz, T)
    n_lags = len(nz)

    lag = (T + np.arange(1, h + 1)[:, None]) - np.arange(1, T + 1)[None, :]
    mask = lag < n_lags
    safe = np.where(mask, lag, 0)
    cross4 = np.where(mask[:, :, None, None], nz[safe], 0.0)   # (h, T, m, m)
    cross = cross4.transpose(0, 2, 1, 3).reshape(h * m, T * m)

    u = fact.solve(x.ravel())
    point = (cross @ u).reshape(h, m)

    w = fact.solve(cross.T)                                     # (T*m, h*m)
    gfut = np.empty((h * m, h * m))
    for i in range(h):
        for j in range(h):
            gfut[i * m:(i + 1) * m, j * m:(j + 1) * m] = _gamma_block(nz, i - j)
    cond = gfut - cross @ w
    var_diag = np.maximum(np.diag(cond), 0.0).reshape(h, m)
    return point, var_diag


def forecast(data, model, delta=None, h=1, coverage=0.95, trunc=None,
             chain=None, max_draws=1000):
    """Finite-sample conditional-Gaussian forecast of the next h steps.

    Plug-in intervals use the fitted model's conditional variances.  When
    ``chain`` (posterior draws) is supplied, the forecast averages over
    thinned draws and the intervals combine innovation noise with
    parameter uncertainty (posterior-predictive moments).
    """
    if h < 1:
        raise ValueError("horizon h must be >= 1")
    if not 0.0 < coverage < 1.0:
        raise ValueError("coverage must be in (0, 1)")
    x = _as_values(data)
    T, m = x.shape
    z = float(norm.ppf(0.5 + coverage / 2.0))
    if chain is None:
        if delta is None:
            delta = np.zeros(m)
        delta = np.asarray(delta, dtype=float)
        if trunc is None:
            trunc = default_truncation(model.q)
        point, var_diag = _conditional_forecast(model, x - delta, h, trunc)
        return ForecastResult(point + delta, z * np.sqrt(var_diag), coverage)

    idx = chain.retained_indices()
    if len(idx) > max_draws:
        idx = idx[np.linspace(0, len(idx) - 1, max_draws).astype(int)]
    points = np.empty((len(idx), h, m))
    vars_ = np.empty((len(idx), h, m))
    for out, i in enumerate(idx):
        model_i, delta_i = chain.model(i), chain.delta_draws[i]
        t_i = trunc if trunc is not None else default_truncation(model_i.q)
        p, v = _conditional_forecast(model_i, x - delta_i, h, t_i)
        points[out] = p + delta_i
        vars_[out] = v
    point = points.mean(axis=0)
    total_var = vars_.mean(axis=0) + points.var(axis=0)
    return ForecastResult(point, z * np.sqrt(total_var), coverage)


def _symmetric_sqrt(sigma):
    vals, vecs = np.linalg.eigh(sigma)
    vals = np.maximum(vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.T


def simulate(model, delta=None, T=100, seed=0, trunc=DEFAULT_TRUNCATION, burn=0):
    """Draw a length-T sample path of the truncated moving average.

    Innovations are iid Gaussian with covariance exp(omega0), applied
    through the Wold coefficients psi_0..psi_trunc; the moving average is
    finitely dependent, so ``burn`` defaults to 0.  Deterministic given
    the seed.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    m = model.m
    if delta is None:
        delta = np.zeros(m)
    delta = np.asarray(delta, dtype=float)
    rng = np.random.default_rng(seed)
    psi = _wold_stack(model.omega_stack(), m, trunc)
    root = _symmetric_sqrt(innovation_covariance(model))
    eps = rng.standard_normal((T + burn + trunc, m)) @ root
    x = np.zeros((T + burn, m))
    for j in range(trunc + 1):
        x += eps[trunc - j: trunc - j + T + burn] @ psi[j].T
    return DataPanel(x[burn:] + delta)


# ---------------------------------------------------------------------------
# OLS VAR(1) benchmark

@dataclass(frozen=True)
class Var1Fit:
    intercept: np.ndarray
    coef: np.ndarray        # (m, m), row i regresses series i on lagged X
    resid_cov: np.ndarray


def fit_var1_ols(data):
    """X_t on (1, X_{t-1}) by least squares; no stability enforcement."""
    x = _as_values(data)
    T, m = x.shape
    if T < m + 2:
        raise ValueError("too few observations for a VAR(1) fit")
    design = np.column_stack([np.ones(T - 1), x[:-1]])
    target = x[1:]
    beta, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = target - design @ beta
    dof = max(T - 1 - (m + 1), 1)
    return Var1Fit(
        intercept=beta[0].copy(),
        coef=beta[1:].T.copy(),
        resid_cov=resid.T @ resid / dof,
    )


def var1_forecast(fit, last_obs, h):
    """Iterated point forecasts of the fitted VAR(1)."""
    cur = np.asarray(last_obs, dtype=float)
    out = np.empty((h, cur.size))
    for j in range(h):
        cur = fit.intercept + fit.coef @ cur
        out[j] = cur
    return out


def holdout_benchmark(data, q, holdout=12, fit_config=None):
    """Fit on all but the last ``holdout`` points; compare forecast MSPE.

    Returns per-series mean squared prediction errors for the VEXP
    maximum-likelihood fit and the OLS VAR(1), plus their totals.
    """
    from .mle import FitConfig, fit_mle

    x = _as_values(data)
    T, m = x.shape
    if T <= holdout + m + 2:
        raise ValueError("not enough data for the requested holdout")
    train, test = x[:-holdout], x[-holdout:]

    fit = fit_mle(DataPanel(train), q, fit_config or FitConfig())
    fc = forecast(train, fit.model, delta=fit.mean, h=holdout)
    vexp_err = np.mean((fc.point - test) ** 2, axis=0)

    var1 = fit_var1_ols(train)
    var1_pred = var1_forecast(var1, train[-1], holdout)
    var1_err = np.mean((var1_pred - test) ** 2, axis=0)

    return {
        "vexp_mspe": vexp_err,
        "var1_mspe": var1_err,
        "vexp_total": float(vexp_err.sum()),
        "var1_total": float(var1_err.sum()),
        "converged": fit.converged,
    }
