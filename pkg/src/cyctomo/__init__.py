"""Exact cyclotomic arithmetic and discrete tomography of cyclotomic model sets."""

from .cyclotomic import CycNum, QuadraticSurd

__version__ = "0.1.0"

__all__ = ["CycNum", "QuadraticSurd", "__version__"]
