"""Certified computations for the slit-torus Teichmüller ray driven by alpha = [1, 4, 9, 16, ...]."""

__version__ = "0.1.0"
