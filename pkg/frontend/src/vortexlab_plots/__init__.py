"""Figure renderer for vortexlab CSV outputs."""

from .errors import MissingColumn, PlotsError, SchemaMismatch
from .figures import FigureSpec, render

__all__ = ["FigureSpec", "render", "PlotsError", "SchemaMismatch",
           "MissingColumn"]
