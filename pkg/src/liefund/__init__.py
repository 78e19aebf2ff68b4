"""Lie symmetries and fundamental solutions of linear PDEs."""

__version__ = "0.1.0"
