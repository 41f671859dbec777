"""Finite-difference spectra of magnetic Schrödinger operators and eigenvalue-bound verification."""

__version__ = "0.1.0"
