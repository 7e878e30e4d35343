"""Rational self-closeness numbers of cell complexes via Quillen and Sullivan models."""

__version__ = "0.1.0"
