"""Matplotlib renderings of the report tables, saved next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

RC = {
    "figure.figsize": (6.4, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "font.size": 10,
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def save_partial_sums_figure(reports: dict, path: Path) -> Path:
    """Energy partial sums S_N per compartment for each labeled state."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for label, report in reports.items():
            s_left, s_right = report.energy_partial_sums
            n = np.arange(1, s_left.size + 1)
            ax.plot(n, s_left, label=f"{label} left ({report.divergence_class})")
            ax.plot(n, s_right, linestyle="--", label=f"{label} right")
        ax.set_xlabel("compartment modes kept (N)")
        ax.set_ylabel("truncated compartment energy $S_N$")
        ax.set_title("Insertion energy partial sums")
        ax.legend(fontsize=8)
        return _save(fig, path)


def save_cost_figure(breakdown, path: Path) -> Path:
    """Baseline vs combined cost, with the posterior branches underneath."""
    with plt.rc_context(RC):
        fig, (ax_cost, ax_post) = plt.subplots(1, 2, figsize=(8.0, 4.0))
        ax_cost.bar(["Helstrom baseline", "with side-channel"],
                    [breakdown.helstrom_baseline, breakdown.combined_cost],
                    color=["#777777", "#2c7fb8"])
        ax_cost.set_ylabel("expected Bayes cost")
        probs = [row.probability for row in breakdown.posterior_table]
        posts = [row.posterior for row in breakdown.posterior_table]
        ax_post.scatter(posts, probs, s=14)
        ax_post.set_xlabel("posterior prior after signal")
        ax_post.set_ylabel("outcome probability")
        ax_post.set_xlim(-0.05, 1.05)
        fig.suptitle("Discrimination cost breakdown")
        return _save(fig, path)


def save_sweep_figure(entries, path: Path) -> Path:
    """Combined cost against detector error, one curve per prior."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        by_xi: dict[float, list] = {}
        for entry in entries:
            by_xi.setdefault(entry.xi, []).append(entry)
        for xi, rows in by_xi.items():
            eps = [r.epsilon for r in rows]
            cost = [r.breakdown.combined_cost for r in rows]
            line, = ax.plot(eps, cost, label=f"prior {xi:g}")
            ax.axhline(rows[0].breakdown.helstrom_baseline, color=line.get_color(),
                       linestyle=":", linewidth=0.8)
        ax.set_xlabel("detector error rate")
        ax.set_ylabel("combined cost (dotted: Helstrom baseline)")
        ax.set_title("Cost sweep")
        if len(by_xi) <= 10:
            ax.legend(fontsize=8)
        return _save(fig, path)


def save_density_figure(grid, path: Path, barrier: float | None = None) -> Path:
    """Heatmap of |psi(x, t)|^2 over the grid, barrier marked when present."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        if grid.times.size > 1:
            mesh = ax.pcolormesh(grid.positions, grid.times, grid.density,
                                 shading="nearest", cmap="magma")
            fig.colorbar(mesh, ax=ax, label=r"$|\psi(x,t)|^2$")
            ax.set_ylabel("t")
        else:
            ax.plot(grid.positions, grid.density[0])
            ax.set_ylabel(r"$|\psi(x)|^2$")
        if barrier is not None:
            ax.axvline(barrier, color="white" if grid.times.size > 1 else "black",
                       linestyle="--", linewidth=0.8)
        ax.set_xlabel("x")
        ax.set_title("Probability density")
        return _save(fig, path)
