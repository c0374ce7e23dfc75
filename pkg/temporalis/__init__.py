"""Stable model reasoning for DatalogMTL with negation over the integers."""

__all__ = ["__version__"]
__version__ = "0.1.0"
