"""Hyperbolic surfaces with fixed-point-free involutions."""
from .errors import HypSurfError

__version__ = "0.1.0"
