"""Rabi-wave dynamics of multichain qubit lattices coupled to one quantised field mode."""

__version__ = "0.1.0"
