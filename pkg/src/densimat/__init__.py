"""Density-matrix field simulator for the Schroedinger and Dirac equations.

Subpackages: ``grids`` (grids, transforms, lift views), ``schrodinger``,
``dirac`` (matrix fields, families, observables), ``em`` (minimal coupling and
Maxwell), ``scenarios`` and ``cli``.
"""
from .errors import ConfigError, ContractViolation, NumericalDivergence, ResolutionError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "ConfigError", "ContractViolation", "NumericalDivergence", "ResolutionError",
           "__version__"]
