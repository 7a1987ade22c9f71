"""Cepstral (matrix-exponential) modeling of multivariate time series.

The package represents a covariance-stationary vector process through the
matrix exponential of a matrix polynomial: every real parameter value
yields a stable, invertible model, so likelihood surfaces and priors live
on an unconstrained space.  Modules cover the coefficient algebra,
autocovariances and spectra, exact and Whittle likelihoods, maximum
likelihood and Bayesian (spike-and-slab) estimation, multi-step
forecasting, simulation, and a CLI.
"""

__version__ = "0.1.0"

from .cepstral import (
    CepstralModel,
    MatrixPolynomial,
    InvalidWoldError,
    DEFAULT_TRUNCATION,
    matrix_exp,
    poly_mul_trunc,
    wold_from_cepstral,
    cepstral_from_wold,
    innovation_covariance,
    param_dim,
    param_names,
    to_params,
    model_from_params,
)
from .spectral import (
    AcfSequence,
    SpectralMatrix,
    acf_from_wold,
    acf_of_model,
    inverse_acf,
    spectral_density,
    spectral_density_grid,
    squared_coherence,
    squared_coherence_grid,
    periodogram,
)
from .likelihood import (
    DataPanel,
    NumericalSingularityError,
    default_truncation,
    gaussian_deviance,
    whittle_deviance,
    approx_whittle_deviance,
    one_step_prediction,
)
from .mle import FitConfig, FitResult, GlrResult, fit_mle, numerical_hessian, glr_test
from .bayes import (
    SsvsConfig,
    PriorConfig,
    SsvsState,
    Chain,
    ssvs_log_prior,
    log_posterior,
    log_posterior_parts,
    model_from_state,
    mcmc_run,
    inclusion_frequencies,
    posterior_summary,
)
from .forecast import (
    ForecastResult,
    Var1Fit,
    forecast_filter,
    forecast,
    simulate,
    fit_var1_ols,
    var1_forecast,
    holdout_benchmark,
)
from .io import (
    DataFormatError,
    load_csv,
    write_csv,
    save_model,
    load_model,
    save_chain,
    load_chain,
    seasonal_difference,
)

__all__ = [name for name in dir() if not name.startswith("_")]
