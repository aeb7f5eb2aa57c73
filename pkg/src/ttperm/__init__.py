"""Exact workbench for bounded complexes of permutation modules."""

__version__ = "0.1.0"
