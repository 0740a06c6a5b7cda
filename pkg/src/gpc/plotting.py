"""Static figures written alongside the JSON reports."""

from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from gpc.channel import cp_condition_qubit  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "svg.hashsalt": "gpc",
    "svg.fonttype": "path",
}
EXTENT = 1.5


def tetrahedron_slice(lambda3: float, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Grid of (lam1, lam2) over [-1.5, 1.5]^2 and the qubit CP mask at lam3."""
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    axis = np.linspace(-EXTENT, EXTENT, resolution)
    mask = np.array([[cp_condition_qubit((l1, l2, lambda3)) for l1 in axis] for l2 in axis])
    return axis, mask


def plot_tetrahedron_slice(lambda3: float, resolution: int, path) -> dict:
    """Render the CP region of the (lam1, lam2) slice to ``path``.

    Returns a summary of the classified grid for the JSON report.
    """
    axis, mask = tetrahedron_slice(lambda3, resolution)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        step = axis[1] - axis[0]
        ax.imshow(mask, origin="lower", cmap="Greys", vmin=0, vmax=1.6, interpolation="nearest",
                  extent=(axis[0] - step / 2, axis[-1] + step / 2,
                          axis[0] - step / 2, axis[-1] + step / 2))
        ax.set_xlabel(r"$\lambda_1$")
        ax.set_ylabel(r"$\lambda_2$")
        ax.set_title(rf"CP slice at $\lambda_3 = {lambda3:g}$")
        ax.set_aspect("equal")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return {
        "lambda3": lambda3,
        "resolution": resolution,
        "extent": [-EXTENT, EXTENT],
        "cp_points": int(mask.sum()),
        "total_points": int(mask.size),
    }


def plot_sample_scatter(records, path, title: str = "") -> None:
    """Smallest analytic margin against smallest Choi eigenvalue per sample."""
    data = np.asarray(records, dtype=float).reshape(-1, 2)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.axhline(0, color="0.6", lw=0.8)
        ax.axvline(0, color="0.6", lw=0.8)
        ax.scatter(data[:, 0], data[:, 1], s=3, color="k", alpha=0.5, linewidths=0)
        ax.set_xlabel("smallest analytic margin")
        ax.set_ylabel("smallest Choi eigenvalue")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
