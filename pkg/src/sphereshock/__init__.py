"""Numerical laboratory for equivariant shock formation on the 2-sphere."""

__version__ = "0.1.0"
