"""High-precision tools for two-cut unitary matrix model partition functions."""

__version__ = "0.1.0"
