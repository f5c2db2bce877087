"""Recurrence coefficients of modified Laguerre orthogonal polynomials,
Painleve IV auxiliary quantities, and their double-scaling asymptotics,
all at configurable arbitrary precision."""

from .numerics import PrecisionContext
from .weight_moments import ModelParams

__version__ = "0.1.0"

__all__ = ["PrecisionContext", "ModelParams", "__version__"]
