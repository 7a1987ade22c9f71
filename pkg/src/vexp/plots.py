"""Figure rendering for the CLI report commands.

Each function writes one PNG next to the delimited output it mirrors; the
CSV files remain the primary interface and every figure can be disabled
with --no-plot.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_forecast(path, history, result, names=None):
    """Recent history, point forecasts, and interval band per series."""
    history = np.asarray(history, dtype=float)
    m = history.shape[1]
    names = names or [f"x{j + 1}" for j in range(m)]
    h = result.horizon
    tail = history[-max(3 * h, 24):]
    t_hist = np.arange(-len(tail) + 1, 1)
    t_fore = np.arange(1, h + 1)
    fig, axes = plt.subplots(m, 1, figsize=(8, 2.6 * m), sharex=True, squeeze=False)
    for j in range(m):
        ax = axes[j, 0]
        ax.plot(t_hist, tail[:, j], color="black", lw=1.0, label="observed")
        ax.plot(t_fore, result.point[:, j], color="tab:blue", lw=1.2,
                marker="o", ms=3, label="forecast")
        ax.fill_between(t_fore, result.lower[:, j], result.upper[:, j],
                        color="tab:blue", alpha=0.25,
                        label=f"{result.coverage:.0%} interval")
        ax.axvline(0.5, color="gray", lw=0.8, ls=":")
        ax.set_ylabel(names[j])
    axes[0, 0].legend(loc="upper left", fontsize=8)
    axes[-1, 0].set_xlabel("steps ahead")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_spectrum(path, freqs, spectra, names=None):
    """Diagonal spectra on a log scale, one line per series."""
    spectra = np.asarray(spectra)
    m = spectra.shape[1]
    names = names or [f"x{j + 1}" for j in range(m)]
    fig, ax = plt.subplots(figsize=(8, 4))
    for j in range(m):
        ax.semilogy(freqs, np.real(spectra[:, j, j]), lw=1.2, label=names[j])
    ax.set_xlabel("frequency")
    ax.set_ylabel("spectral density")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_coherence(path, freqs, rho, lower=None, upper=None):
    """Squared coherence with an optional pointwise band."""
    fig, ax = plt.subplots(figsize=(8, 4))
    if lower is not None and upper is not None:
        ax.fill_between(freqs, lower, upper, color="tab:blue", alpha=0.25,
                        label="pointwise band")
    ax.plot(freqs, rho, color="tab:blue", lw=1.2, label="squared coherence")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("frequency")
    ax.set_ylabel("squared coherence")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
