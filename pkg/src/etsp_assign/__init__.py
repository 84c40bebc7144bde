"""Distributed target assignment over a shared ETSP tour ordering."""

__version__ = "0.1.0"
