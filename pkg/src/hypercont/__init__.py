"""Generalized hypergeometric series p+1Fp near unit argument."""

__version__ = "0.1.0"
