"""Figure rendering for report outputs.

Every figure function writes a PNG next to the delimited data the CLI
emits.  The Agg backend keeps rendering headless and deterministic.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scoring import EllipseThreshold, Quadratic, Tabular


def render_scorer(k, path: str, title: str = "scoring function"):
    """Heatmap of a tabular scorer or contour plot of a continuous one."""
    fig, ax = plt.subplots(figsize=(5, 4))
    if isinstance(k, Tabular):
        im = ax.imshow(k.values, cmap="coolwarm", origin="lower")
        fig.colorbar(im, ax=ax, label="score")
        ax.set_xlabel("peer report")
        ax.set_ylabel("own report")
    elif isinstance(k, (Quadratic, EllipseThreshold)):
        grid = np.linspace(-6.0, 6.0, 201)
        x, y = np.meshgrid(grid, grid, indexing="ij")
        z = np.asarray(k.evaluate(x, y), dtype=float)
        cs = ax.contourf(grid, grid, z.T, levels=20, cmap="coolwarm")
        fig.colorbar(cs, ax=ax, label="score")
        ax.set_xlabel("own report")
        ax.set_ylabel("peer report")
    else:
        raise TypeError(f"cannot render scorer of type {type(k).__name__}")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def render_payments(alice: np.ndarray, bob: np.ndarray, path: str):
    """Per-replicate payment histogram for both agents."""
    fig, ax = plt.subplots(figsize=(5, 4))
    bins = min(30, max(5, len(alice) // 4))
    ax.hist(alice, bins=bins, alpha=0.6, label="alice")
    ax.hist(bob, bins=bins, alpha=0.6, label="bob")
    ax.axvline(float(np.mean(alice)), color="C0", linestyle="--", linewidth=1)
    ax.axvline(float(np.mean(bob)), color="C1", linestyle="--", linewidth=1)
    ax.set_xlabel("payment (nats)")
    ax.set_ylabel("replicates")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
