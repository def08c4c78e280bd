"""Matplotlib report figures rendered next to the CSV/JSON outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .scene import AXES, CameraTrajectory

_POSITION_AXES = AXES[:3]
_ANGLE_AXES = AXES[3:]


def trajectory_figure(trajectory: CameraTrajectory, path) -> Path:
    """Six stacked per-axis plots of the trajectory over time."""
    path = Path(path)
    t = np.arange(len(trajectory)) / trajectory.fps
    fig, axes = plt.subplots(2, 3, figsize=(11, 5), sharex=True)
    for k, name in enumerate(AXES):
        ax = axes[k // 3][k % 3]
        ax.plot(t, trajectory.axis(k), linewidth=1.0, color="#2b6cb0")
        unit = "m" if name in _POSITION_AXES else "rad"
        ax.set_title(f"{name} [{unit}]", fontsize=9)
        ax.grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("time [s]")
    fig.suptitle("camera trajectory")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def shakiness_figure(vectors: dict, path) -> Path:
    """Grouped bar chart of per-axis shakiness for labelled trajectories."""
    path = Path(path)
    labels = list(vectors)
    count = max(len(labels), 1)
    x = np.arange(len(AXES), dtype=float)
    width = 0.8 / count
    fig, ax = plt.subplots(figsize=(8, 4))
    for i, label in enumerate(labels):
        ax.bar(x + (i - (count - 1) / 2) * width, np.asarray(vectors[label], dtype=float),
               width=width, label=label)
    ax.set_xticks(x)
    ax.set_xticklabels(AXES)
    ax.set_ylabel("shakiness per frame")
    ax.grid(axis="y", alpha=0.3)
    if labels:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def emotion_sweep_figure(grid, totals, path) -> Path:
    """Total shakiness against the emotion factor sweep."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(np.asarray(grid, dtype=float), np.asarray(totals, dtype=float),
            marker="o", color="#b03030")
    ax.set_xlabel("emotion factor E")
    ax.set_ylabel("total shakiness")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
