"""Numerical harmonic analysis for the Jacobi transform and radial analysis on Damek-Ricci spaces."""

__version__ = "0.1.0"
