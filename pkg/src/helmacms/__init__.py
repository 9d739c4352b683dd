"""Approximate component mode synthesis (ACMS) for the heterogeneous Helmholtz equation."""

__version__ = "0.1.0"
