"""Paper-style figures from matching-bandits CSV outputs."""

__version__ = "0.1.0"

from .figures import FIGURE_KINDS, FigureSpec, build_figure, render
from .io import SchemaError, read_aggregate_csv, read_proxy_csv
from .smoothing import loess

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "loess",
    "read_aggregate_csv",
    "read_proxy_csv",
    "render",
    "__version__",
]
