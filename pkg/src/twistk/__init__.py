"""Graded twisting maps between truncated connected graded algebras."""
__version__ = "0.1.0"
