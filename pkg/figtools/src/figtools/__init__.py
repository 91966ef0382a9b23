"""Render publication-style figures from reconstruction sweep CSV files.

The package is strictly read-only over its inputs: every figure is drawn
from the results, traces, or spectra CSV emitted by the reconstruction
pipeline, with no numerical post-processing beyond grouping and averaging.
"""

from .figures import FIGURE_IDS, METHOD_COLORS, FigureSpec, SchemaError, plot, render

__all__ = ["FigureSpec", "SchemaError", "plot", "render", "FIGURE_IDS", "METHOD_COLORS"]
