"""Numerics for a critical Neumann problem in the half-space.

Weighted bubble test functions and their norms, expansion coefficients,
existence thresholds, fiber-map levels, eigenvalue bounds and a sound
(λ, μ) region classifier.
"""

from .errors import (
    DegenerateDenominator,
    DomainError,
    GeometryError,
    HalfspaceError,
    IllConditionedGram,
    NonConvergence,
    SingularFit,
    SoundnessError,
)
from .numerics import DEFAULT_SPEC, QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SPEC",
    "QuadratureSpec",
    "HalfspaceError",
    "DomainError",
    "NonConvergence",
    "GeometryError",
    "SingularFit",
    "IllConditionedGram",
    "DegenerateDenominator",
    "SoundnessError",
]
