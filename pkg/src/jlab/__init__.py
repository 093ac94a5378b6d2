"""Finite-algebra toolkit for Jónsson terms, witness chains and congruence identities."""

__version__ = "0.1.0"
