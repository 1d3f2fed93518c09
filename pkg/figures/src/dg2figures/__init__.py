"""Figure rendering for dg2 CSV exports."""

from .render import FigureSpec, SchemaError, load_config, load_grid, load_scan, render

__version__ = "0.1.0"
