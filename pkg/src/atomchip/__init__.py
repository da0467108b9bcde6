"""Atom-chip device modeling toolkit."""

__version__ = "0.1.0"
