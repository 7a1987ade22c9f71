"""Quasi-Newton maximum likelihood over the unconstrained parameter space.

Every real parameter vector is a valid (stable, invertible) model, so the
optimizer runs over all of R^dim with no projections or rejections.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize
from scipy.stats import chi2

from .cepstral import (
    CepstralModel,
    model_from_params,
    param_dim,
    param_names,
    to_params,
)
from .likelihood import (
    DataPanel,
    approx_whittle_deviance,
    default_truncation,
    gaussian_deviance,
    whittle_deviance,
)
from .spectral import acf_of_model

__all__ = [
    "FitConfig",
    "FitResult",
    "GlrResult",
    "fit_mle",
    "numerical_hessian",
    "glr_test",
]

OBJECTIVES = ("gaussian", "whittle", "approx_whittle")


@dataclass
class FitConfig:
    """Knobs for :func:`fit_mle`; defaults follow the module contracts."""

    objective: str = "gaussian"
    tol: float = 1e-6              # gradient sup-norm at convergence
    max_iter: int = 500
    grad_step: float = 1e-6        # relative central-difference step
    hess_step: float = 1e-4
    trunc: int = None              # Wold truncation; default max(15, q+25)
    deviance_method: str = "banded"
    bounds: float = None           # half-width of an optional box around 0
    sparsify: bool = False         # refit with |est| < z*SE forced to zero
    sparsify_z: float = 1.96
    compute_std_errors: bool = True


@dataclass
class FitResult:
    params: np.ndarray
    model: object
    mean: np.ndarray
    objective_value: float
    objective_kind: str
    std_errors: np.ndarray
    mean_std_errors: np.ndarray
    iterations: int
    converged: bool
    n_obs: int
    zero_mask: np.ndarray = None
    message: str = ""

    @property
    def param_labels(self):
        return param_names(self.model.m, self.model.q)

    def mean_deviance(self):
        """Objective per observation, the scale :func:`glr_test` expects."""
        return self.objective_value / self.n_obs


@dataclass
class GlrResult:
    statistic: float
    p_value: float
    df: int


def _objective_fn(kind, x, q, m, trunc, method):
    # The frequency-domain objectives carry T * tr(omega0) so the
    # log-determinant penalty matches the Gaussian deviance scale;
    # without it the innovation scale is off by a factor of T.
    T = x.shape[0]

    if kind == "gaussian":
        def fn(theta):
            model = model_from_params(theta, m, q)
            try:
                return gaussian_deviance(model, x, trunc=trunc, method=method)
            except (ArithmeticError, FloatingPointError):
                return np.inf
    elif kind == "whittle":
        def fn(theta):
            model = model_from_params(theta, m, q)
            return (whittle_deviance(model, x, trunc=trunc)
                    + (T - 1) * float(np.trace(model.omega0)))
    elif kind == "approx_whittle":
        def fn(theta):
            model = model_from_params(theta, m, q)
            return (approx_whittle_deviance(model, x)
                    + (T - 1) * float(np.trace(model.omega0)))
    else:
        raise ValueError(f"unknown objective {kind!r}; pick one of {OBJECTIVES}")

    def guarded(theta):
        with np.errstate(over="ignore", invalid="ignore"):
            val = fn(theta)
        return val if np.isfinite(val) else np.inf

    return guarded


def _central_gradient(fn, theta, rel_step):
    grad = np.empty_like(theta)
    for i in range(theta.size):
        h = rel_step * (1.0 + abs(theta[i]))
        up = theta.copy(); up[i] += h
        dn = theta.copy(); dn[i] -= h
        grad[i] = (fn(up) - fn(dn)) / (2.0 * h)
    return grad


def numerical_hessian(objective, at, rel_step=1e-4):
    """Central second differences with per-coordinate relative steps.

    Symmetric by construction; raises if any stencil evaluation is
    non-finite, naming the offending coordinate.
    """
    at = np.asarray(at, dtype=float)
    n = at.size
    h = rel_step * (1.0 + np.abs(at))
    f0 = objective(at)
    if not np.isfinite(f0):
        raise ValueError("objective non-finite at the expansion point")
    hess = np.empty((n, n))

    def ev(theta, coord):
        val = objective(theta)
        if not np.isfinite(val):
            raise ValueError(f"objective non-finite perturbing coordinate {coord}")
        return val

    for i in range(n):
        up = at.copy(); up[i] += h[i]
        dn = at.copy(); dn[i] -= h[i]
        hess[i, i] = (ev(up, i) - 2.0 * f0 + ev(dn, i)) / h[i] ** 2
        for j in range(i + 1, n):
            pp = at.copy(); pp[i] += h[i]; pp[j] += h[j]
            pm = at.copy(); pm[i] += h[i]; pm[j] -= h[j]
            mp = at.copy(); mp[i] -= h[i]; mp[j] += h[j]
            mm = at.copy(); mm[i] -= h[i]; mm[j] -= h[j]
            val = (ev(pp, i) - ev(pm, i) - ev(mp, j) + ev(mm, j)) / (4 * h[i] * h[j])
            hess[i, j] = val
            hess[j, i] = val
    return hess


def _std_errors_from_hessian(hess):
    """sqrt(diag(2*H^{-1})): deviance is -2 log likelihood, so the MLE
    covariance is twice the inverse Hessian.  Entries that come out
    non-positive (non-pd Hessian) are reported as NaN."""
    n = hess.shape[0]
    try:
        cov = 2.0 * np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        cov = 2.0 * np.linalg.pinv(hess)
    diag = np.diag(cov).copy()
    bad = ~np.isfinite(diag) | (diag <= 0)
    diag[bad] = np.nan
    return np.sqrt(diag)


def _minimize(fn, x0, cfg):
    grad = lambda t: _central_gradient(fn, t, cfg.grad_step)
    if cfg.bounds is not None:
        b = float(cfg.bounds)
        res = optimize.minimize(
            fn, x0, jac=grad, method="L-BFGS-B",
            bounds=[(-b, b)] * x0.size,
            options={"maxiter": cfg.max_iter, "gtol": cfg.tol},
        )
    else:
        res = optimize.minimize(
            fn, x0, jac=grad, method="BFGS",
            options={"maxiter": cfg.max_iter, "gtol": cfg.tol, "norm": np.inf},
        )
    return res


def _initial_omega0(x):
    """Symmetric matrix log of the sample covariance: the white-noise fit."""
    cov = x.T @ x / x.shape[0]
    cov = (cov + cov.T) / 2.0
    vals, vecs = np.linalg.eigh(cov)
    floor = 1e-10 * max(float(vals.max()), 1e-300)
    vals = np.maximum(vals, floor)
    w0 = (vecs * np.log(vals)) @ vecs.T
    return (w0 + w0.T) / 2.0


def _mean_std_errors(model, T, trunc):
    """SEs of the sample mean under the fitted model: the usual
    (1/T) sum (1-|h|/T) Gamma_h long-run variance."""
    acf = acf_of_model(model, min(T - 1, trunc), trunc)
    var = acf.gammas[0].copy()
    for h in range(1, acf.max_lag + 1):
        w = 1.0 - h / T
        var += w * (acf.gammas[h] + acf.gammas[h].T)
    diag = np.diag(var) / T
    return np.sqrt(np.maximum(diag, 0.0))


def fit_mle(data, q, config=None):
    """Minimize the chosen deviance over the unconstrained parameter space.

    The panel is demeaned internally by its sample mean (stored on the
    result); the initial point is the symmetric matrix log of the sample
    covariance with all higher coefficients zero.
    """
    cfg = config or FitConfig()
    panel = data if isinstance(data, DataPanel) else DataPanel(data)
    x = panel.values - panel.mean()
    T, m = x.shape
    dim = param_dim(m, q)
    if T * m <= dim:
        warnings.warn(
            f"only {T * m} observations for {dim} parameters", stacklevel=2
        )
    trunc = cfg.trunc if cfg.trunc is not None else default_truncation(q)
    fn = _objective_fn(cfg.objective, x, q, m, trunc, cfg.deviance_method)

    x0 = np.zeros(dim)
    x0[: m * (m + 1) // 2] = to_params(CepstralModel(_initial_omega0(x)))
    if not np.isfinite(fn(x0)):
        raise ValueError("objective is non-finite at the initial point")

    res = _minimize(fn, x0, cfg)
    theta = np.asarray(res.x, dtype=float)
    zero_mask = None
    std = np.full(dim, np.nan)
    if cfg.compute_std_errors or cfg.sparsify:
        std = _std_errors_from_hessian(
            numerical_hessian(fn, theta, cfg.hess_step)
        )
    iterations = int(res.nit)
    converged = bool(res.success)
    message = str(res.message)

    if cfg.sparsify:
        with np.errstate(invalid="ignore"):
            zero_mask = np.abs(theta) < cfg.sparsify_z * std
        if np.any(zero_mask):
            free = ~zero_mask

            def fn_masked(sub):
                full = np.zeros(dim)
                full[free] = sub
                return fn(full)

            sub_cfg = replace(cfg, sparsify=False)
            res2 = _minimize(fn_masked, theta[free], sub_cfg)
            theta = np.zeros(dim)
            theta[free] = res2.x
            iterations += int(res2.nit)
            converged = bool(res2.success)
            message = str(res2.message)
            if cfg.compute_std_errors:
                sub_std = _std_errors_from_hessian(
                    numerical_hessian(fn_masked, res2.x, cfg.hess_step)
                )
                std = np.zeros(dim)
                std[free] = sub_std

    model = model_from_params(theta, m, q)
    return FitResult(
        params=theta,
        model=model,
        mean=panel.mean(),
        objective_value=float(fn(theta)),
        objective_kind=cfg.objective,
        std_errors=std,
        mean_std_errors=_mean_std_errors(model, T, trunc),
        iterations=iterations,
        converged=converged,
        n_obs=T,
        zero_mask=zero_mask,
        message=message,
    )


def glr_test(deviance_nested, deviance_nesting, df, sample_size):
    """Likelihood-ratio test of a nested model against a nesting one.

    Both deviances must be on the per-observation scale (total deviance
    divided by T, cf. :meth:`FitResult.mean_deviance`), so the statistic
    sample_size * (nested - nesting) is the total-deviance gap, which is
    asymptotically chi-square with ``df`` degrees of freedom under the
    nested model.
    """
    if df <= 0:
        raise ValueError("df must be a positive integer")
    statistic = max(0.0, sample_size * (deviance_nested - deviance_nesting))
    return GlrResult(
        statistic=float(statistic),
        p_value=float(chi2.sf(statistic, df)),
        df=int(df),
    )
