"""Render line plots and heatmaps from qetsim sweep CSVs.

The input is the frozen CSV schema written by ``qetsim reproduce``; this
package never recomputes any physics, it only reads columns. Each
figure id maps to a list of panels drawn side by side into one image.
Skipped rows appear as gaps (lines) or blank cells (heatmaps). Output
images carry no timestamps, so re-rendering identical CSVs reproduces
identical files.

Script usage: ``render_figures <csv_dir> <out_dir> [--figure ID]``.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADER = (
    "scenario,axis1_name,axis1,axis2_name,axis2,e_out_max,e_out_theta1,e_out_theta2,"
    "theta_star,D,F,E0,EA,injected,p1,p2,p3,p4,residual,min_eig,gap_ratio,skipped,skip_reason"
).split(",")

# black solid / red dashed / green dotted / blue dash-dot, cycled
LINE_STYLES = (
    ("black", "-"),
    ("red", "--"),
    ("green", ":"),
    ("blue", "-."),
)


class MissingColumn(Exception):
    """A panel references a column absent from the CSV."""


class EmptyData(Exception):
    """The CSV holds no plottable rows."""


@dataclass(frozen=True)
class PanelSpec:
    """One panel of a figure: what to put on which axis, grouped how."""

    figure_id: str
    panel_id: str
    kind: str  # "lines" | "heatmap"
    x_column: str
    y_columns: tuple[str, ...]
    series_column: str = ""
    x_label: str = ""
    y_label: str = ""


def _lines(figure_id, panel_id, x, ys, series="", x_label="", y_label=""):
    return PanelSpec(figure_id, panel_id, "lines", x, tuple(ys), series, x_label, y_label)


def _heat(figure_id):
    return PanelSpec(
        figure_id, "map", "heatmap", "axis1", ("e_out_max",), "", "", "E_out (max)"
    )


PANELS: dict[str, tuple[PanelSpec, ...]] = {
    "fig1": (
        _lines("fig1", "eout", "axis2", ["e_out_max"], "axis1", "theta", "E_out"),
    ),
    "fig2a": (
        _lines("fig2a", "eout", "axis2", ["e_out_max"], "axis1", "T", "E_out (max)"),
        _lines("fig2a", "pops", "axis2", ["p1"], "axis1", "T", "population"),
    ),
    "fig2b": (
        _lines("fig2b", "eout", "axis2", ["e_out_max"], "axis1", "eps", "E_out (max)"),
        _lines("fig2b", "pops", "axis2", ["p1"], "axis1", "eps", "population"),
    ),
    "fig3": (
        _lines("fig3", "eout", "axis2", ["e_out_theta1", "e_out_theta2"], "axis1", "mu", "E_out"),
        _lines("fig3", "pops", "axis2", ["p4"], "axis1", "mu", "population"),
    ),
    "fig4a1": (
        _lines("fig4a1", "eout", "axis2", ["e_out_max"], "axis1", "dT", "E_out (max)"),
        _lines("fig4a1", "pops", "axis2", ["p1", "p2"], "axis1", "dT", "population"),
    ),
    "fig4a2_bosonic_heatmap": (_heat("fig4a2_bosonic_heatmap"),),
    "fig5a": (
        _lines("fig5a", "eout", "axis1", ["e_out_max"], "", "dT", "E_out (max)"),
        _lines("fig5a", "pops", "axis1", ["p1", "p2"], "", "dT", "population"),
    ),
    "fig5b": (
        _lines("fig5b", "eout", "axis1", ["e_out_max"], "", "dT", "E_out (max)"),
        _lines("fig5b", "pops", "axis1", ["p2", "p4"], "", "dT", "population"),
    ),
    "fig5c": (
        _lines("fig5c", "eout", "axis1", ["e_out_max"], "", "dT", "E_out (max)"),
        _lines("fig5c", "pops", "axis1", ["p2", "p4"], "", "dT", "population"),
    ),
    "fig6a": (
        _lines("fig6a", "eout", "axis1", ["e_out_max"], "", "dmu", "E_out (max)"),
        _lines("fig6a", "pops", "axis1", ["p1", "p2"], "", "dmu", "population"),
    ),
    "fig6b": (
        _lines("fig6b", "eout", "axis1", ["e_out_max"], "", "dmu", "E_out (max)"),
        _lines("fig6b", "pops", "axis1", ["p1", "p2", "p3", "p4"], "", "dmu", "population"),
    ),
    "fig6c": (
        _lines("fig6c", "eout", "axis1", ["e_out_max"], "", "dmu", "E_out (max)"),
        _lines("fig6c", "pops", "axis1", ["p1", "p2", "p3", "p4"], "", "dmu", "population"),
    ),
    "fig7a": (
        _lines("fig7a", "eout", "axis1", ["e_out_max"], "", "deps", "E_out (max)"),
        _lines("fig7a", "pops", "axis1", ["p1", "p2"], "", "deps", "population"),
    ),
    "fig7b": (
        _lines("fig7b", "eout", "axis1", ["e_out_max"], "", "deps", "E_out (max)"),
        _lines("fig7b", "pops", "axis1", ["p2", "p4"], "", "deps", "population"),
    ),
    "fig8a1": (_heat("fig8a1"),),
    "fig8a2": (_heat("fig8a2"),),
    "fig8b1": (_heat("fig8b1"),),
    "fig8b2": (_heat("fig8b2"),),
    "fig8c1": (_heat("fig8c1"),),
    "fig8c2": (_heat("fig8c2"),),
}


def load_rows(csv_path: Path) -> list[dict[str, str]]:
    """Rows of a sweep CSV as string dicts, validated against the schema."""
    with open(csv_path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyData(f"{csv_path} has no header") from None
        missing = [column for column in EXPECTED_HEADER if column not in header]
        if missing:
            raise MissingColumn(f"{csv_path} lacks columns {missing}")
        rows = [dict(zip(header, row)) for row in reader]
    if not rows:
        raise EmptyData(f"{csv_path} has a header but no data rows")
    return rows


def _value(row: dict[str, str], column: str) -> float:
    if column not in row:
        raise MissingColumn(f"column {column!r} not present")
    text = row[column]
    return math.nan if text == "" else float(text)


def _draw_lines(ax, rows: list[dict[str, str]], panel: PanelSpec) -> None:
    if panel.series_column:
        keys = sorted({row[panel.series_column] for row in rows}, key=float)
        groups = [(key, [r for r in rows if r[panel.series_column] == key]) for key in keys]
    else:
        groups = [("", rows)]
    style = 0
    for key, group in groups:
        xs = np.array([_value(r, panel.x_column) for r in group])
        order = np.argsort(xs)
        for column in panel.y_columns:
            ys = np.array([_value(r, column) for r in group])[order]
            color, dashes = LINE_STYLES[style % len(LINE_STYLES)]
            label = " ".join(part for part in (f"{panel.series_column}={key}" if key else "", column) if part)
            ax.plot(xs[order], ys, color=color, linestyle=dashes, label=label)
            style += 1
    ax.set_xlabel(panel.x_label or panel.x_column)
    ax.set_ylabel(panel.y_label or ", ".join(panel.y_columns))
    ax.legend(fontsize=7)


def _draw_heatmap(ax, rows: list[dict[str, str]], panel: PanelSpec) -> None:
    xs = sorted({float(r["axis1"]) for r in rows})
    ys = sorted({float(r["axis2"]) for r in rows})
    x_index = {v: i for i, v in enumerate(xs)}
    y_index = {v: i for i, v in enumerate(ys)}
    grid = np.full((len(ys), len(xs)), np.nan)
    for row in rows:
        value = _value(row, panel.y_columns[0])
        grid[y_index[float(row["axis2"])], x_index[float(row["axis1"])]] = value
    mesh = ax.pcolormesh(xs, ys, np.ma.masked_invalid(grid), shading="nearest", cmap="viridis")
    ax.figure.colorbar(mesh, ax=ax, label=panel.y_label)
    if xs[0] <= 0.0 <= xs[-1] and ys[0] <= 0.0 <= ys[-1]:
        ax.plot([0.0], [0.0], marker="+", color="white", markersize=10)  # equilibrium center
    ax.set_xlabel(rows[0]["axis1_name"])
    ax.set_ylabel(rows[0]["axis2_name"])


def render_figure(csv_path, figure_id: str):
    """Build the matplotlib figure for one preset CSV and return it."""
    if figure_id not in PANELS:
        raise KeyError(f"no panel layout registered for {figure_id!r}")
    rows = load_rows(Path(csv_path))
    panels = PANELS[figure_id]
    fig, axes = plt.subplots(1, len(panels), figsize=(5.0 * len(panels), 3.6))
    if len(panels) == 1:
        axes = [axes]
    plotted = [row for row in rows if row["skipped"] != "true"]
    if not plotted:
        raise EmptyData(f"{csv_path}: every row is skipped")
    for ax, panel in zip(axes, panels):
        if panel.kind == "heatmap":
            _draw_heatmap(ax, rows, panel)  # skipped rows become blank cells
        else:
            _draw_lines(ax, plotted, panel)
    fig.suptitle(figure_id)
    fig.tight_layout()
    return fig


def render(csv_dir, figure_id: str, out_path) -> Path:
    """Render one figure image from ``<csv_dir>/<figure_id>.csv``."""
    csv_path = Path(csv_dir) / f"{figure_id}.csv"
    fig = render_figure(csv_path, figure_id)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="render_figures", description=__doc__)
    parser.add_argument("csv_dir")
    parser.add_argument("out_dir")
    parser.add_argument("--figure", default=None, help="render only this figure id")
    args = parser.parse_args(argv)
    figure_ids = [args.figure] if args.figure else sorted(PANELS)
    try:
        for figure_id in figure_ids:
            target = render(args.csv_dir, figure_id, Path(args.out_dir) / f"{figure_id}.png")
            print(f"wrote {target}")
    except (MissingColumn, EmptyData, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
