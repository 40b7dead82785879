"""Structural one-period loss models for covered bonds."""

from covbond.errors import (
    CovBondError,
    Infeasible,
    InfeasibleMoments,
    NoBracket,
    NoConvergence,
    NotEquivalent,
)

__version__ = "0.1.0"

__all__ = [
    "CovBondError",
    "Infeasible",
    "InfeasibleMoments",
    "NoBracket",
    "NoConvergence",
    "NotEquivalent",
]
