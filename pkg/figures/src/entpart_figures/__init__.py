"""Figure rendering for entpart results CSVs."""

from .render import BuiltFigure, FigureSpec, RenderError, build_figure, render

__version__ = "0.1.0"

__all__ = ["BuiltFigure", "FigureSpec", "RenderError", "build_figure", "render"]
