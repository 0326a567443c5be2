"""Schnyder-wood triangulations, their lattice-walk encoding, samplers and statistics."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
