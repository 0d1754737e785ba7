"""Verification engine for the symmetry and conservation-law structure of the drift flux system."""
__version__ = "1.0.0"
