"""Lagrangian planes in the null-cone of linear Hamiltonian systems."""

__version__ = "0.1.0"
