"""Render experiment outputs as figures saved alongside the CSV files."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import IoFailure
from .experiments import NodeResult, SweepRow


def _save(fig, path: str | Path) -> None:
    try:
        fig.savefig(path, dpi=150, bbox_inches="tight")
    except OSError as exc:
        raise IoFailure(f"cannot write figure to {path}: {exc}") from exc
    finally:
        plt.close(fig)


def render_sweep_figure(rows: list[SweepRow], path: str | Path) -> None:
    """Mean localization error versus the swept parameter, one line per
    (algorithm, weighting mode)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    series: dict[tuple[str, str], list[SweepRow]] = {}
    for r in rows:
        series.setdefault((r.algorithm, r.weighting_mode), []).append(r)
    for (algorithm, mode), group in series.items():
        group = sorted(group, key=lambda r: (r.sweep_value is None, r.sweep_value))
        xs = [r.sweep_value for r in group]
        ys = [r.stats.mean for r in group]
        label = algorithm if mode == "none" else f"{algorithm} ({mode})"
        ax.plot(xs, ys, marker="o", label=label)
    ax.set_xlabel(rows[0].sweep_name if rows else "value")
    ax.set_ylabel("mean localization error (m)")
    ax.grid(True, alpha=0.4)
    ax.legend()
    _save(fig, path)


def render_error_histogram(rows: list[SweepRow], path: str | Path) -> None:
    """Distribution of per-trial mean errors, one histogram per row."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    any_data = False
    for r in rows:
        if not r.stats.per_trial:
            continue
        any_data = True
        label = r.algorithm if r.weighting_mode == "none" else f"{r.algorithm} ({r.weighting_mode})"
        ax.hist(r.stats.per_trial, bins=20, alpha=0.55, label=label)
    ax.set_xlabel("per-trial mean localization error (m)")
    ax.set_ylabel("trials")
    ax.grid(True, alpha=0.4)
    if any_data:
        ax.legend()
    _save(fig, path)


def render_positions_figure(results: list[NodeResult], path: str | Path) -> None:
    """True versus estimated planar positions with error segments."""
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    for res in results:
        t, e = res.true_position, res.estimate.position
        ax.plot([t.x, e.x], [t.y, e.y], color="gray", linewidth=0.8, zorder=1)
    ax.scatter(
        [r.true_position.x for r in results],
        [r.true_position.y for r in results],
        marker="o", facecolors="none", edgecolors="black", label="true", zorder=2,
    )
    ax.scatter(
        [r.estimate.position.x for r in results],
        [r.estimate.position.y for r in results],
        marker="x", color="tab:red", label="estimated", zorder=3,
    )
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.4)
    ax.legend()
    _save(fig, path)
