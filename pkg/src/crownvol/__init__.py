"""Volumes of fool's-crown and cusped-disc moduli spaces, with the geometric,
Poisson and continuum identities they rest on."""
from .errors import ConvergenceError, DomainError
from .volumes import (
    MCEstimate,
    QuadratureResult,
    crown_volume_mc,
    crown_volume_quadrature,
    disc_volume_mc,
    disc_volume_quadrature,
    v1_closed,
    v2_closed,
    v3_closed,
    v4_reduced_quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "MCEstimate",
    "QuadratureResult",
    "crown_volume_mc",
    "crown_volume_quadrature",
    "disc_volume_mc",
    "disc_volume_quadrature",
    "v1_closed",
    "v2_closed",
    "v3_closed",
    "v4_reduced_quadrature",
]
