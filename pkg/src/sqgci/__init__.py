"""Pseudo-spectral workbench for convex-integration iterates of the
stationary relaxed SQG momentum equation on the 2-torus."""

__version__ = "0.1.0"
