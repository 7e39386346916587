"""Exact certification of rational curves on complete intersection Calabi-Yau threefolds."""

__version__ = "0.1.0"
