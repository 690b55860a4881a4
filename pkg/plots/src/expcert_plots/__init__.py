"""Figure generation from expansion-certificate sweep CSV files."""

__version__ = "0.1.0"

from .data import BoxStats, MissingInput, SchemaMismatch, read_sweep_csv
from .render import KINDS, FigureSpec, render
