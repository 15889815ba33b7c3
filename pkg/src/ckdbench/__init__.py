"""Classifier toolkit and cross-validation benchmark for chronic kidney disease data."""

__version__ = "0.1.0"
