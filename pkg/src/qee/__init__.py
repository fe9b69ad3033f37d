"""Qubit-environment entanglement for pure-dephasing evolutions."""

__version__ = "0.1.0"
