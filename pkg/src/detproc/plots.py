"""Figure rendering for the command-line reports.

All helpers write PNG files through the non-interactive Agg backend and
return the output path; they never open windows.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

__all__ = [
    "plot_kernel_heatmap",
    "plot_density_comparison",
    "plot_histogram_vs_density",
    "plot_trend",
]

_DPI = 150


def plot_kernel_heatmap(path, xs, ys, kmat, title: str) -> str:
    """Heatmap of a kernel matrix over its coordinate grid."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.pcolormesh(ys, xs, kmat, shading="auto", cmap="RdBu_r")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("y")
    ax.set_ylabel("x")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_density_comparison(path, x, curves: dict, title: str) -> str:
    """Overlay of named density curves on a shared grid."""
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    for label, y in curves.items():
        ax.plot(x, y, label=label, lw=1.4)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_histogram_vs_density(path, edges, hist, se, x, ref, title: str) -> str:
    """Histogram bars with error bars against a reference curve."""
    centers = 0.5 * (np.asarray(edges)[1:] + np.asarray(edges)[:-1])
    widths = np.diff(edges)
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    ax.bar(
        centers,
        hist,
        width=widths,
        alpha=0.45,
        yerr=se,
        capsize=2,
        label="empirical",
        color="#4878a8",
    )
    ax.plot(x, ref, "k-", lw=1.4, label="kernel prediction")
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_trend(path, x, series: dict, title: str, xlabel: str, log_y: bool = False) -> str:
    """Convergence / trend lines, optionally on a log ordinate."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, y in series.items():
        ax.plot(x, y, "o-", ms=3.5, lw=1.2, label=label)
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)
