"""Numerical verification of spinor restriction identities and generalized cones."""

__version__ = "0.1.0"
