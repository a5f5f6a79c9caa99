"""Render report figures: solution components and tracking-error curves."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_LOG_FLOOR = 1e-18  # semilog plots cannot show exact zeros


def _mark_phases(ax, summary):
    for key in ("n0", "n_end"):
        if key in summary:
            ax.axvline(summary[key], color="gray", lw=0.8, ls=":")


def render_report_figures(report, outdir):
    """Write solution.png and error.png next to the delimited output."""
    outdir = Path(outdir)
    paths = []

    n = report.n
    fig, axes = plt.subplots(max(n, 1), 1, sharex=True, figsize=(7, 2.6 * max(n, 1)),
                             squeeze=False)
    for i in range(n):
        ax = axes[i, 0]
        ax.plot(report.t, report.xhat[:, i], "b-", lw=1.2, label="predicted")
        ax.plot(report.t, report.xstar[:, i], "r--", lw=1.2, label="optimal")
        ax.plot(report.t, report.xgd[:, i], "g-.", lw=0.9, label="static GD")
        ax.set_ylabel(f"x_{i+1}")
        _mark_phases(ax, report.summary)
        if i == 0:
            ax.legend(loc="best", fontsize=8)
    axes[-1, 0].set_xlabel("t")
    fig.suptitle(f"{report.scenario}: tracked vs optimal solution")
    fig.tight_layout()
    sol_path = outdir / "solution.png"
    fig.savefig(sol_path, dpi=150)
    plt.close(fig)
    paths.append(sol_path)

    fig, ax = plt.subplots(figsize=(7, 4))
    ax.semilogy(report.t, np.maximum(report.err_pred, _LOG_FLOOR), "b-", label="predictor")
    ax.semilogy(report.t, np.maximum(report.err_gd, _LOG_FLOOR), "r--", label="static GD")
    ax.set_xlabel("t")
    ax.set_ylabel("distance to optimum")
    _mark_phases(ax, report.summary)
    ax.legend(loc="best", fontsize=8)
    ax.set_title(f"{report.scenario}: tracking error")
    fig.tight_layout()
    err_path = outdir / "error.png"
    fig.savefig(err_path, dpi=150)
    plt.close(fig)
    paths.append(err_path)
    return paths
