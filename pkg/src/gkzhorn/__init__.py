"""Exact computations for GKZ, lattice basis binomial and Horn hypergeometric systems."""

__version__ = "0.1.0"
