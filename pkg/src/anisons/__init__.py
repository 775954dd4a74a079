"""Pseudospectral solver, energy diagnostics and inequality checks for the
anisotropic hyperdissipative Navier-Stokes system on the periodic 3-torus."""

__version__ = "0.1.0"
