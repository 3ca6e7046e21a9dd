"""Rendering package for qetsim sweep CSVs."""

from .render import EmptyData, MissingColumn, PanelSpec, render, render_figure

__all__ = ["EmptyData", "MissingColumn", "PanelSpec", "render", "render_figure"]
