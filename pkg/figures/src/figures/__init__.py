"""Publication figures for the semantic-network simulation outputs."""

from .render import FIGURE_IDS, FigureJob, SchemaError, render

__all__ = ["FIGURE_IDS", "FigureJob", "SchemaError", "render"]
__version__ = "0.1.0"
