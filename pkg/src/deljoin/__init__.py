"""Homology of k-fold Boolean algebras, deleted joins and their quotients."""

__version__ = "0.1.0"
