"""Exact Frobenius, tight-closure and local-cohomology simplicity computations over F_p."""

__version__ = "0.1.0"
