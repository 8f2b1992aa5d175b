"""Exact computations with nodal quartic sections of the smooth quadric threefold."""

__version__ = "0.1.0"
