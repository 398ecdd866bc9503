"""Quick-look figures rendered next to the delimited outputs.

Each CLI report writes its data as CSV/JSON and one PNG per run; the CSVs
remain the source of truth for external plotting.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_COLORS = {
    "exact": "tab:blue",
    "trotter": "tab:orange",
    "sampled": "tab:green",
    "postselected": "tab:red",
}

_SAVE_OPTS = {"dpi": 150, "metadata": {"Software": "schwingersim"}}


def save_evolve_figure(rows_by_variant: dict[str, list], path) -> None:
    """P_vac, particle density and leakage panels for each trajectory variant."""
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.0, 7.0))
    for variant, rows in rows_by_variant.items():
        times = [r.time for r in rows]
        style = dict(color=_COLORS.get(variant, None), label=variant)
        if variant == "exact":
            axes[0].plot(times, [r.p_vac for r in rows], "-", **style)
            axes[1].plot(times, [r.nu for r in rows], "-", **style)
            axes[2].plot(times, [r.leakage for r in rows], "-", **style)
        else:
            axes[0].plot(times, [r.p_vac for r in rows], "o", ms=4, **style)
            axes[1].plot(times, [r.nu for r in rows], "o", ms=4, **style)
            axes[2].plot(times, [r.leakage for r in rows], "o", ms=4, **style)
    axes[0].set_ylabel(r"$P_\mathrm{vac}$")
    axes[1].set_ylabel(r"$\nu$")
    axes[2].set_ylabel(r"$P_\overline{\mathrm{sym}}$")
    axes[2].set_xlabel("t")
    axes[0].legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def save_bounds_figure(reports: list, fits: dict[str, tuple], path) -> None:
    """Two-qubit gate totals against N on log-log axes with the fitted lines."""
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    methods = ["commutator_bound", "exact_commutator", "empirical"]
    markers = {"commutator_bound": "s", "exact_commutator": "D", "empirical": "o"}
    for method in methods:
        pts = [(r.n_sites, r.gate_counts[method]) for r in reports if method in r.gate_counts]
        if not pts:
            continue
        ns = np.array([p[0] for p in pts], dtype=float)
        counts = np.array([p[1] for p in pts], dtype=float)
        label = method.replace("_", " ")
        if method in fits:
            exponent, intercept, _ = fits[method]
            grid = np.linspace(ns.min(), ns.max(), 50)
            ax.plot(grid, np.exp(intercept) * grid**exponent, "-", alpha=0.6)
            label += rf" ($N^{{{exponent:.1f}}}$)"
        ax.plot(ns, counts, markers[method], label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("two-qubit gates")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def save_alpha_sweep_figure(rows: list[tuple], curves: dict, path) -> None:
    """Optimal leakage per evolution time, plus any full sweep curves."""
    n_panels = 2 if curves else 1
    fig, axes = plt.subplots(n_panels, 1, figsize=(5.5, 3.5 * n_panels), squeeze=False)
    ax = axes[0][0]
    if rows:
        ts = [r[0] for r in rows]
        ax.semilogy(ts, [max(r[2], 1e-12) for r in rows], "o-")
    ax.set_xlabel("t")
    ax.set_ylabel("minimum leakage")
    if curves:
        ax2 = axes[1][0]
        for t, (alphas, values) in sorted(curves.items()):
            ax2.plot(np.asarray(alphas) / np.pi, values, label=f"t = {t:g}")
        ax2.set_xlabel(r"$\alpha_1 / \pi$")
        ax2.set_ylabel("leakage")
        ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
