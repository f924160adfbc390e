"""Riesz energies and spherical cap discrepancies on S^1, S^2, S^3."""

__version__ = "0.1.0"
