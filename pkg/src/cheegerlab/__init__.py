"""Exact verification of Cheeger-type spectral bounds for finite Markov kernels."""

__version__ = "0.1.0"
