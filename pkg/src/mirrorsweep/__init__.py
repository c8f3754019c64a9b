"""Reflection-symmetry plane detection from one image via plane-sweep photo-consistency."""

__version__ = "0.1.0"
