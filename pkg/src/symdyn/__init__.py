"""Desk-scale workbench for two-dimensional symbolic dynamics."""

__version__ = "0.1.0"
