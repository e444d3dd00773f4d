"""Hierarchical indoor-scene engine."""

__version__ = "0.1.0"
