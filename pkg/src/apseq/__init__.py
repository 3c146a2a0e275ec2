"""Arithmetic-progression statistics of orderings of finite additive sets."""

__version__ = "0.1.0"
