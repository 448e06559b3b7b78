"""Simulation toolkit for a driven two-resonator / two-qubit circuit with engineered loss and gain."""

__version__ = "0.1.0"
