"""Figure rendering for tfpp experiment CSVs (schema v1)."""

from .render import KINDS, render
from .schema import Row, SchemaError, read_rows

__version__ = "0.1.0"
