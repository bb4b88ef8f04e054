"""Radial harmonic analysis on the quantum complex hyperbolic space H_{n,m}."""

from .errors import CapacityError, DivisionByZero, NonConvergent, PoleError, QRadialError, ValidationError
from .qcore import GridFunction, QContext, RadialGridPoint

__all__ = [
    "CapacityError",
    "DivisionByZero",
    "GridFunction",
    "NonConvergent",
    "PoleError",
    "QContext",
    "QRadialError",
    "RadialGridPoint",
    "ValidationError",
]
