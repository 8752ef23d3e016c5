"""Delta-product modal logics: formulas, frames, counter machines and their encodings."""

from .formula import parse, render
from .semantics import Model, check_at

__all__ = ["parse", "render", "Model", "check_at"]
__version__ = "0.1.0"
