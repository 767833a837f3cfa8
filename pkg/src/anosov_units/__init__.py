"""Algebraic-unit obstructions for Anosov Lie algebras."""

__version__ = "0.1.0"
