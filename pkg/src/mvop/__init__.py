"""Exact symbolic-numeric toolkit for matrix-valued Jacobi-type orthogonal polynomials."""

__version__ = "0.1.0"
