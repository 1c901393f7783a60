"""Figure rendering for the rydberg-precession simulator's file outputs."""

from .figures import FigureSpec, render_figure
from .io import ParseError, read_curve_csv, read_grid, read_overlay

__version__ = "0.1.0"
