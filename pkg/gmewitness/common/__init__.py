"""Data models shared across packages."""

from .models import (
    SIGMA_CONVENTIONS,
    DisplacementSpec,
    ObservableTriple,
    SigmaConvention,
    TrialCounts,
    WitnessParams,
    sigma_multiplier,
)

__all__ = [
    "SIGMA_CONVENTIONS",
    "DisplacementSpec",
    "ObservableTriple",
    "SigmaConvention",
    "TrialCounts",
    "WitnessParams",
    "sigma_multiplier",
]
