"""Figure recipes: which CSV columns each plot needs and how it is drawn.

Every recipe renders deterministically from its input tables, then writes a
sidecar JSON (``<image>.json``) holding the min/max of each plotted quantity
for regression diffing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .csvio import Table, read_table  # noqa: E402


class RecipeError(ValueError):
    """Unknown recipe id or wrong number of inputs."""


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    inputs: tuple[Path, ...]
    output: Path

    def __post_init__(self):
        if self.figure_id not in RECIPES:
            raise RecipeError(
                f"unknown recipe {self.figure_id!r}; "
                f"known: {', '.join(sorted(RECIPES))}")
        if not self.inputs:
            raise RecipeError("at least one input CSV is required")


def _pivot(table: Table, x_key: str, y_key: str, v_key: str):
    """Long-form rows -> (x, y, grid) with grid[y, x] = value."""
    table.require(x_key, y_key, v_key)
    x = np.unique(table[x_key])
    y = np.unique(table[y_key])
    grid = np.full((len(y), len(x)), np.nan)
    xi = np.searchsorted(x, table[x_key])
    yi = np.searchsorted(y, table[y_key])
    grid[yi, xi] = table[v_key]
    return x, y, grid


def _per_group_curves(ax, table: Table, group_key: str, x_key: str,
                      v_key: str, group_fmt: str) -> None:
    table.require(group_key, x_key, v_key)
    for value in np.unique(table[group_key]):
        sel = table[group_key] == value
        order = np.argsort(table[x_key][sel])
        ax.plot(table[x_key][sel][order], table[v_key][sel][order],
                label=group_fmt.format(value))
    ax.legend(fontsize=8)


# --- line-cut and curve recipes --------------------------------------------

def _render_density_cut(tables: Sequence[Table], ax) -> dict:
    for table in tables:
        table.require("p_hbark", "density_initial", "density_final")
        ax.plot(table["p_hbark"], table["density_initial"], ls="--",
                lw=0.8, color="0.6")
        ax.plot(table["p_hbark"], table["density_final"],
                label=table.label())
    ax.set_xlabel("momentum (hbar K)")
    ax.set_ylabel("momentum density")
    ax.legend(fontsize=8)
    return {"density_final": np.concatenate(
        [t["density_final"] for t in tables])}


def _render_width_loglog(tables: Sequence[Table], ax) -> dict:
    for table in tables:
        table.require("delta_tau_us", "width_hbark")
        order = np.argsort(table["delta_tau_us"])
        ax.loglog(table["delta_tau_us"][order], table["width_hbark"][order],
                  marker="o", ms=3, label=table.label())
    ax.set_xlabel("pulse width (us)")
    ax.set_ylabel("resonance width (hbar K)")
    ax.legend(fontsize=8)
    return {"width_hbark": np.concatenate(
        [t["width_hbark"] for t in tables])}


def _render_efficiency_curves(tables: Sequence[Table], ax) -> dict:
    for table in tables:
        _per_group_curves(ax, table, "delta_tau_us", "delta_p_hbark",
                          "efficiency", "{:.3g} us")
    ax.set_xlabel("packet momentum width (hbar K)")
    ax.set_ylabel("efficiency")
    return {"efficiency": np.concatenate([t["efficiency"] for t in tables])}


def _render_loss_curves(tables: Sequence[Table], ax) -> dict:
    for table in tables:
        _per_group_curves(ax, table, "delta_p_hbark", "delta_tau_us",
                          "loss", "dp = {:.3g}")
    ax.set_xlabel("pulse width (us)")
    ax.set_ylabel("loss")
    return {"loss": np.concatenate([t["loss"] for t in tables])}


def _render_interferogram(tables: Sequence[Table], ax) -> dict:
    for table in tables:
        table.require("phase_rad", "intensity")
        ax.plot(table["phase_rad"], table["intensity"], label=table.label())
    ax.set_xlabel("phase (rad)")
    ax.set_ylabel("exit-port intensity")
    ax.legend(fontsize=8)
    return {"intensity": np.concatenate([t["intensity"] for t in tables])}


def _render_population_curves(tables: Sequence[Table], ax) -> dict:
    bins = ["p_minus", "p_zero", "p_plus", "p_other"]
    quantities = {}
    for table in tables:
        table.require("delta_tau_us", *bins)
        order = np.argsort(table["delta_tau_us"])
        for name in bins:
            ax.plot(table["delta_tau_us"][order], table[name][order],
                    label=f"{table.label()} {name}")
            quantities.setdefault(name, []).append(table[name])
    ax.set_xlabel("pulse width (us)")
    ax.set_ylabel("population")
    ax.legend(fontsize=7)
    return {k: np.concatenate(v) for k, v in quantities.items()}


def _render_optimal_area(tables: Sequence[Table], ax) -> dict:
    for table in tables:
        table.require("p0_hbark", "area_opt_over_pi")
        order = np.argsort(table["p0_hbark"])
        ax.plot(table["p0_hbark"][order], table["area_opt_over_pi"][order],
                marker="o", ms=3, label=table.label())
    ax.set_xlabel("mean momentum p0 (hbar K)")
    ax.set_ylabel("optimal pulse area (pi)")
    ax.legend(fontsize=8)
    return {"area_opt_over_pi": np.concatenate(
        [t["area_opt_over_pi"] for t in tables])}


# --- density-map recipes ----------------------------------------------------

def _render_map(tables: Sequence[Table], ax, value: str) -> dict:
    table = tables[0]
    x, y, grid = _pivot(table, "delta_tau_us", "delta_p_hbark", value)
    mesh = ax.pcolormesh(x, y, grid, shading="nearest")
    ax.figure.colorbar(mesh, ax=ax, label=value)
    ax.set_xlabel("pulse width (us)")
    ax.set_ylabel("packet momentum width (hbar K)")
    return {value: grid[np.isfinite(grid)]}


def _render_amplitude_map(tables, ax):
    return _render_map(tables, ax, "amplitude")


def _render_contrast_map(tables, ax):
    return _render_map(tables, ax, "contrast")


def _render_transition_map(tables: Sequence[Table], ax) -> dict:
    """Efficiency over (p0, packet width), with the resonance-width curve
    overlaid and the dashed diagonal where the packet width equals p0."""
    table = tables[0]
    p0, dp, grid = _pivot(table, "p0_hbark", "delta_p_hbark", "efficiency")
    mesh = ax.pcolormesh(p0, dp, grid, shading="nearest", vmin=0.0, vmax=1.0)
    ax.figure.colorbar(mesh, ax=ax, label="efficiency")

    table.require("width_hbark")
    order = np.argsort(table["p0_hbark"])
    width_p0 = table["p0_hbark"][order]
    width = table["width_hbark"][order]
    keep = np.concatenate([[True], np.diff(width_p0) > 0])
    ax.plot(width_p0[keep], width[keep], color="tab:orange", lw=1.5,
            label="resonance width")
    ax.plot(p0, p0, ls="--", color="tab:pink", lw=1.2, label="dp = p0")
    ax.set_xlim(p0[0], p0[-1])
    ax.set_ylim(dp[0], dp[-1])
    ax.set_xlabel("mean momentum p0 (hbar K)")
    ax.set_ylabel("packet momentum width (hbar K)")
    ax.legend(fontsize=8, loc="upper left")
    return {"efficiency": grid[np.isfinite(grid)],
            "width_hbark": width[keep]}


RECIPES: dict[str, Callable] = {
    "fig3": _render_density_cut,
    "fig4": _render_width_loglog,
    "fig5": _render_efficiency_curves,
    "fig6": _render_loss_curves,
    "fig7": _render_interferogram,
    "fig8": _render_population_curves,
    "fig9": _render_amplitude_map,
    "fig10": _render_contrast_map,
    "fig11b": _render_optimal_area,
    "fig11c": _render_transition_map,
}


def render(recipe: FigureRecipe) -> Path:
    """Render the figure and its sidecar JSON; returns the image path.

    All inputs are read and validated before anything is written, so a bad
    CSV never leaves a partial image behind.
    """
    tables = [read_table(path) for path in recipe.inputs]
    fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=150)
    try:
        quantities = RECIPES[recipe.figure_id](tables, ax)
        fig.tight_layout()
        fig.savefig(recipe.output)
    finally:
        plt.close(fig)

    sidecar = {
        "recipe": recipe.figure_id,
        "inputs": [str(p) for p in recipe.inputs],
        "quantities": {
            name: {"min": float(np.min(values)),
                   "max": float(np.max(values))}
            for name, values in sorted(quantities.items())
        },
    }
    sidecar_path = Path(f"{recipe.output}.json")
    with open(sidecar_path, "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return Path(recipe.output)
