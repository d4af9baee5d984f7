"""Generalized Bernstein-Bezier operators and their numerical verification."""

from bbops.version import __version__

__all__ = ["__version__"]
