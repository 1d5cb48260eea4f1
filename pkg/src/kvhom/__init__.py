"""Exact homology of Koszul-Vinberg algebras, modules and algebroid models."""

__version__ = "0.1.0"
