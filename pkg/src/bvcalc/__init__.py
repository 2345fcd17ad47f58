"""Exact symbolic calculus on split odd-symplectic supermanifolds."""

__version__ = "0.1.0"
