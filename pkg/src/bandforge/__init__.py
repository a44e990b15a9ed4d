"""Orthonormal bases realizing prescribed matrix structure for banded operators on l2(N)."""

__version__ = "0.1.0"
