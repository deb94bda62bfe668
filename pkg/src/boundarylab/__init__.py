"""Exact computational laboratory for boundary crossed products of free groups."""

__version__ = "0.1.0"
