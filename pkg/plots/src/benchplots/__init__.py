"""Figure rendering for benchmark result CSVs."""

from .figures import FigureSpec, SchemaError, Series, read_rows, render, series_data

__version__ = "0.1.0"
