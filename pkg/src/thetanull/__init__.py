"""Riemann theta functions with characteristics and vanishing-theta-null tests."""

__version__ = "0.1.0"
