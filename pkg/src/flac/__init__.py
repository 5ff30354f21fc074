"""Principals, types, evaluation and security checks for an information-flow calculus with dynamic delegation."""

__version__ = "0.1.0"
