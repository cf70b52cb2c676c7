"""Static figure rendering for construction and experiment reports."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import ConvexPolygon, MonotoneCurve, curve_eval  # noqa: E402


def polygon_figure(polygon: ConvexPolygon, title: str) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(5, 5))
    if not polygon.is_empty:
        ring = np.vstack([polygon.vertices, polygon.vertices[:1]])
        ax.plot(ring[:, 0], ring[:, 1], lw=1.2)
        ax.fill(ring[:, 0], ring[:, 1], alpha=0.15)
    ax.set_aspect("equal")
    ax.grid(alpha=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    return fig


def curve_figure(curves: list[tuple[MonotoneCurve, str]], title: str,
                 reference: tuple[np.ndarray, np.ndarray, str] | None = None,
                 window: tuple[float, float] | None = None) -> plt.Figure:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for curve, label in curves:
        ax.plot(curve.points[:, 0], curve.points[:, 1], lw=1.2, label=label)
    if reference is not None:
        xs, ys, label = reference
        ax.plot(xs, ys, "--", lw=1.0, label=label)
    if window is not None:
        ax.set_xlim(*window)
    ax.grid(alpha=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    return fig


def profile_figure(grid: np.ndarray, mean_profile: np.ndarray,
                   reference: np.ndarray, distances: list[float],
                   title: str) -> plt.Figure:
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9, 4),
                                  gridspec_kw={"width_ratios": [2, 1]})
    ax.plot(grid, mean_profile, lw=1.4, label="mean scaled profile")
    ax.plot(grid, reference, "--", lw=1.0, label="limit curve")
    ax.grid(alpha=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=8)
    ax2.hist(distances, bins=24, alpha=0.8)
    ax2.set_xlabel("sup distance")
    ax2.set_ylabel("samples")
    ax2.grid(alpha=0.3)
    fig.suptitle(title)
    fig.tight_layout()
    return fig


def staircase_family_figure(curves: list[MonotoneCurve], sums: list[float],
                            constant: float, title: str) -> plt.Figure:
    fig, (ax, ax2) = plt.subplots(1, 2, figsize=(9, 4),
                                  gridspec_kw={"width_ratios": [2, 1]})
    for curve in curves[:24]:
        ax.plot(curve.points[:, 0], curve.points[:, 1], lw=0.7, alpha=0.6)
    ax.grid(alpha=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    devs = [s - constant for s in sums]
    ax2.plot(devs, ".", ms=3)
    ax2.axhline(0.0, color="k", lw=0.6)
    ax2.set_xlabel("curve index")
    ax2.set_ylabel("sum - constant")
    ax2.grid(alpha=0.3)
    fig.suptitle(title)
    fig.tight_layout()
    return fig


def save_figure(fig: plt.Figure, path) -> None:
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
