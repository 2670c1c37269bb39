"""Render trajectory figures next to the CSV output."""

import numpy as np
import matplotlib

matplotlib.use("Agg")  # headless backend; rendering goes straight to file
import matplotlib.pyplot as plt

from .dynamics import Trajectory


def render_trajectory(trajectory: Trajectory, path, title: str | None = None) -> None:
    """Plot the excited populations and the dark fraction against time and
    save the figure to `path` (format from the file extension)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    t = trajectory.times
    M = trajectory.pop_e_atom.shape[1]
    for i in range(M):
        ax.plot(t, trajectory.pop_e_atom[:, i], lw=0.8, alpha=0.45,
                label=f"atom {i + 1}" if M <= 4 else None)
    ax.plot(t, trajectory.pop_e_total, lw=1.8, color="C3", label="total excited")
    if np.all(np.isfinite(trajectory.dark_fraction)):
        ax.plot(t, trajectory.dark_fraction, lw=1.8, color="k", ls="--",
                label="dark fraction")
    ax.set_xlabel(r"$\Gamma t$")
    ax.set_ylabel("population")
    ax.set_xlim(t[0], t[-1])
    ax.set_ylim(bottom=0.0)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8, frameon=False)
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
