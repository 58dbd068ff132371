"""Explicit covering sets for iterated sumsets of finite subsets of abelian groups."""

__version__ = "0.1.0"
