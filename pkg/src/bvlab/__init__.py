"""Exact finite-field computations of paracanonical syzygies, K3 lattice arithmetic and torsion counts."""

__version__ = "0.1.0"
