"""Lagrangian 1D compressible Navier-Stokes with degenerate heat conductivity."""

__version__ = "0.1.0"
