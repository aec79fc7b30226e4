"""Maximal plane curves over small finite fields."""

from .forms import TernaryForm, count_points, line_spectrum, parse_form
from .gf import FieldCtx, field_ctx, field_of_order

__all__ = [
    "FieldCtx",
    "TernaryForm",
    "count_points",
    "field_ctx",
    "field_of_order",
    "line_spectrum",
    "parse_form",
]
__version__ = "0.1.0"
