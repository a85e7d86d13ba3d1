"""Detect and correct directional bias in binary classification labels."""

__version__ = "0.1.0"
