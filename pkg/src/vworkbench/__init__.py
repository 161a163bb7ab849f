"""Workbench for complete additivity, fin/cofin frame semantics and modal proof scripts."""

from .formula import parse, to_text

__version__ = "0.1.0"
__all__ = ["parse", "to_text", "__version__"]
