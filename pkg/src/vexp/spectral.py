"""Autocovariances, spectral density, coherence, and the periodogram."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cepstral import (
    DEFAULT_TRUNCATION,
    _matrix_exp_batch,
    _wold_stack,
    innovation_covariance,
    matrix_exp,
)

__all__ = [
    "AcfSequence",
    "SpectralMatrix",
    "acf_from_wold",
    "acf_of_model",
    "inverse_acf",
    "spectral_density",
    "spectral_density_grid",
    "squared_coherence",
    "squared_coherence_grid",
    "periodogram",
]


@dataclass(frozen=True)
class AcfSequence:
    """Autocovariance matrices gamma_0..gamma_H; gamma_{-h} is gamma_h'."""

    gammas: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float)
        if g.ndim != 3 or g.shape[1] != g.shape[2]:
            raise ValueError(f"gammas must have shape (H+1, m, m), got {g.shape}")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "gammas", g)

    @property
    def m(self):
        return self.gammas.shape[1]

    @property
    def max_lag(self):
        return self.gammas.shape[0] - 1

    def __getitem__(self, h):
        """gamma_h for any integer lag, transposing for negative h."""
        if abs(h) > self.max_lag:
            raise IndexError(f"lag {h} beyond max lag {self.max_lag}")
        return self.gammas[h] if h >= 0 else self.gammas[-h].T


@dataclass(frozen=True)
class SpectralMatrix:
    """Spectral density value at one frequency: Hermitian, nonneg definite."""

    frequency: float
    value: np.ndarray


def _acf_stack(psi, sigma, max_lag):
    """gamma_h = sum_j psi_{j+h} sigma psi_j' for h = 0..max_lag.

    The shifted sums run over a zero-padded sliding window so all lags
    come out of a single einsum.
    """
    n = len(psi)
    m = psi.shape[1]
    right = psi @ sigma  # row j holds psi_j @ sigma
    h_max = min(max_lag, n - 1)
    pad = np.zeros((n + h_max, m, m))
    pad[:n] = psi
    s0, s1, s2 = pad.strides
    win = np.lib.stride_tricks.as_strided(pad, (h_max + 1, n, m, m),
                                          (s0, s0, s1, s2))
    out = np.zeros((max_lag + 1, m, m))
    out[: h_max + 1] = np.einsum("hjab,jcb->hac", win, right)
    out[0] = (out[0] + out[0].T) / 2.0
    return out


def acf_from_wold(psi, sigma, max_lag):
    """Autocovariances of the moving average psi(B) driven by noise cov sigma."""
    if max_lag > psi.truncation:
        raise ValueError(
            f"max lag {max_lag} exceeds Wold truncation {psi.truncation}"
        )
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (psi.m, psi.m):
        raise ValueError(f"sigma has shape {sigma.shape}, expected ({psi.m}, {psi.m})")
    return AcfSequence(_acf_stack(psi.coeffs, sigma, max_lag))


def _model_acf_stack(omega0, omegas, max_lag, trunc):
    m = omega0.shape[0]
    psi = _wold_stack(omegas, m, trunc)
    sigma = matrix_exp(omega0)
    sigma = (sigma + sigma.T) / 2.0
    return _acf_stack(psi, sigma, max_lag), psi


def acf_of_model(model, max_lag, trunc=None):
    """Model autocovariances via the Wold expansion at truncation ``trunc``."""
    if trunc is None:
        trunc = max(DEFAULT_TRUNCATION, max_lag)
    if max_lag > trunc:
        raise ValueError(f"max lag {max_lag} exceeds truncation {trunc}")
    stack, _ = _model_acf_stack(model.omega0, model.omega_stack(), max_lag, trunc)
    return AcfSequence(stack)


def inverse_acf(model, max_lag, trunc=None):
    """Autocovariances of the inverse spectrum: the sign-flipped model."""
    return acf_of_model(model.negated(), max_lag, trunc)


def spectral_density_grid(model, freqs):
    """Spectral density at each frequency, stacked as (n, m, m) complex.

    f(l) = exp(omega(e^{-il})) exp(omega0) exp(omega(e^{-il}))*, evaluated
    with a batched complex matrix exponential across the grid.
    """
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    m = model.m
    sigma = innovation_covariance(model)
    if model.q == 0:
        return np.broadcast_to(sigma.astype(complex), (len(freqs), m, m)).copy()
    z = np.exp(-1j * freqs)  # one value per frequency
    powers = z[:, None] ** np.arange(1, model.q + 1)[None, :]
    arg = np.einsum("nk,kab->nab", powers, model.omega_stack())
    e = _matrix_exp_batch(arg)
    estar = np.conj(np.swapaxes(e, 1, 2))
    return e @ sigma @ estar


def spectral_density(model, freq):
    """Spectral density matrix at one frequency in [-pi, pi]."""
    if not -np.pi - 1e-12 <= freq <= np.pi + 1e-12:
        raise ValueError(f"frequency {freq} outside [-pi, pi]")
    value = spectral_density_grid(model, [freq])[0]
    return SpectralMatrix(float(freq), value)


def _coherence_from_spectra(f, i, j):
    num = np.abs(f[:, i, j]) ** 2
    den = np.real(f[:, i, i]) * np.real(f[:, j, j])
    return num / den


def squared_coherence_grid(model, freqs, pair=None):
    """Squared coherence |f_ij|^2 / (f_ii f_jj) over a frequency grid."""
    if pair is None:
        if model.m != 2:
            raise ValueError(
                "squared coherence needs a bivariate model; pass pair=(i, j) "
                f"to select a 2x2 sub-block of an m={model.m} model"
            )
        pair = (0, 1)
    i, j = pair
    f = spectral_density_grid(model, freqs)
    return _coherence_from_spectra(f, i, j)


def squared_coherence(model, freq, pair=None):
    """Squared coherence at one frequency; always in [0, 1]."""
    return float(squared_coherence_grid(model, [freq], pair)[0])


def periodogram(data, freq):
    """Rank-one sample spectral matrix at one frequency.

    I_T(l) = T^{-1} d(l) d(l)* with d(l) = sum_t X_t e^{-ilt}, t = 1..T.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("data must be a nonempty T x m matrix")
    t = np.arange(1, x.shape[0] + 1)
    d = x.T @ np.exp(-1j * freq * t)
    return np.outer(d, np.conj(d)) / x.shape[0]
