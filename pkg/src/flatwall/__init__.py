"""Flat walls at desk scale: paintings, renditions, flatness pairs,
tilts, homogeneity, levelings, and the wall-finding drivers."""

__version__ = "0.1.0"
