"""Exact approximate-degree certificates: polynomials, dual witnesses and an LP oracle."""

__version__ = "0.1.0"
