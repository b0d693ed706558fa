"""Finite-statistics certification: score ranges, Hoeffding p-values and trial planning."""

from .hoeffding import (
    Ranges,
    empirical_half_widths,
    hoeffding_half_width,
    ln_p_value,
    min_trials,
    p_value,
    planned_log10_p,
    ranges,
)

__all__ = [
    "Ranges",
    "empirical_half_widths",
    "hoeffding_half_width",
    "ln_p_value",
    "min_trials",
    "p_value",
    "planned_log10_p",
    "ranges",
]
