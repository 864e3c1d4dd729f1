"""Figure rendering for command reports.

Figures are a reporting convenience written next to the CSV files; the CSV
stays the canonical machine-readable interface and nothing downstream may
depend on the images.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (6.4, 4.2)
DPI = 150


def _finish(fig, path: Path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
    return str(path)


def theorem1_figure(epsilons, errors, tolerance: float, path: Path) -> str:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.loglog(epsilons, np.maximum(errors, 1e-18), "o-", label="bracket error")
    ax.axhline(tolerance, color="crimson", ls="--", lw=1, label="tolerance")
    ax.set_xlabel("epsilon = T - t")
    ax.set_ylabel("|bracket - horizon limit|")
    ax.set_title("SDE drift bracket approaching the horizon")
    ax.legend()
    return _finish(fig, path)


def theorem2_figure(epsilons, norms, products, path: Path) -> str:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax1.loglog(epsilons, norms, "o-")
    ax1.set_xlabel("epsilon = T - t")
    ax1.set_ylabel("|flow ODE drift|")
    ax1.set_title("drift norm diverges")
    ax2.semilogx(epsilons, products, "s-")
    ax2.set_xlabel("epsilon = T - t")
    ax2.set_ylabel("|drift| * c")
    ax2.set_title("1/c growth law")
    return _finish(fig, path)


def theorem3_figure(taus, kl_post, kl_other, other_label: str, path: Path) -> str:
    fig, ax = plt.subplots(figsize=FIGSIZE)
    idx = np.arange(len(taus))
    ax.plot(idx, kl_post, "o-", label="posterior-style start")
    ax.plot(idx, kl_other, "s-", label=f"{other_label} start")
    ax.set_xlabel("sweep index (condition x tau)")
    ax.set_ylabel("expected start KL")
    ax.set_title("start distribution quality")
    ax.legend()
    return _finish(fig, path)


def samples_figure(samples: np.ndarray, oracle: np.ndarray, path: Path) -> str:
    samples = np.atleast_2d(samples)
    oracle = np.atleast_2d(oracle)
    d = min(samples.shape[1], 4)
    fig, axes = plt.subplots(1, d, figsize=(3.4 * d, 3.4), squeeze=False)
    for i in range(d):
        ax = axes[0][i]
        bins = np.histogram_bin_edges(np.concatenate([samples[:, i], oracle[:, i]]), bins=40)
        ax.hist(oracle[:, i], bins=bins, density=True, histtype="step", label="oracle")
        ax.hist(samples[:, i], bins=bins, density=True, alpha=0.55, label="sampler")
        ax.set_xlabel(f"dim {i}")
        if i == 0:
            ax.set_ylabel("density")
            ax.legend()
    fig.suptitle("sampler output vs analytic target")
    return _finish(fig, path)


def compare_figure(per_method: dict, path: Path) -> str:
    """per_method maps method -> (nfe list, w1 list, var_error list)."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for method, (nfes, w1s, var_errs) in per_method.items():
        ax1.plot(nfes, w1s, "o-", label=method)
        ax2.plot(nfes, var_errs, "s-", label=method)
    for ax, ylabel in ((ax1, "mean per-dim W1"), (ax2, "|variance - target|")):
        ax.set_xlabel("predictor evaluations (NFE)")
        ax.set_ylabel(ylabel)
        ax.set_yscale("log")
    ax1.legend()
    fig.suptitle("sample quality against evaluation budget")
    return _finish(fig, path)


def convergence_figure(studies, path: Path) -> str:
    """studies: iterable of (family, hs, errors, order)."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for family, hs, errors, order in studies:
        ax.loglog(hs, errors, "o-", label=f"{family} (order {order:.2f})")
    ax.set_xlabel("step size h")
    ax.set_ylabel("error vs fine reference")
    ax.set_title("empirical convergence")
    ax.legend()
    return _finish(fig, path)
