"""Hoeffding certification of a witness violation.

The three observables are estimated from independent trials with score
ranges ``delta_o``, ``delta_z``, ``delta_s``. For an observed excess
``t = o_bar + z_bar + s_bar - bound`` the probability that a biseparable
state produces at least that excess is bounded by

    p <= exp(-2 (n + m + l)^2 t^2 / (n delta_o^2 + m delta_z^2 + l delta_s^2))

All p-values are carried as logarithms; published values reach 1e-1952.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from gmewitness.common.models import (
    SigmaConvention,
    TrialCounts,
    WitnessParams,
    sigma_multiplier,
)

_LN10 = math.log(10.0)


@dataclass(frozen=True)
class Ranges:
    """Widths of the per-trial score ranges of the three observables."""

    delta_o: float
    delta_z: float
    delta_s: float

    def __post_init__(self) -> None:
        """Validate positivity."""
        for name in ("delta_o", "delta_z", "delta_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number")

    @property
    def sum_of_squares(self) -> float:
        """``delta_o^2 + delta_z^2 + delta_s^2``."""
        return self.delta_o**2 + self.delta_z**2 + self.delta_s**2


def ranges(
    params: WitnessParams,
    f: np.ndarray,
    sigma_convention: SigmaConvention = "conservative",
) -> Ranges:
    """Score ranges of O, Z and S for a witness and its F coefficients."""
    n = params.n_parties
    f = np.asarray(f, dtype=float)
    if f.shape != (n, n):
        raise ValueError(f"F must be a {n} x {n} matrix")
    f_offdiag = float(f.sum() - np.trace(f))
    return Ranges(
        delta_o=2.0 * n * (n - 1),
        delta_z=params.lam + f_offdiag + n * (n - 1) + params.mu,
        delta_s=sigma_multiplier(sigma_convention) * n * n * (n - 1),
    )


def _exponent(t: float, r: Ranges, n: int, m: int, l: int) -> float:  # noqa: E741
    """Natural-log exponent ``-2 (n+m+l)^2 t^2 / (n do^2 + m dz^2 + l ds^2)``."""
    total = float(n + m + l)
    weight = n * r.delta_o**2 + m * r.delta_z**2 + l * r.delta_s**2
    return -2.0 * total * total * t * t / weight


def ln_p_value(counts: TrialCounts, bound: float, r: Ranges) -> float:
    """Natural logarithm of the Hoeffding p-value (0 when there is no excess)."""
    t = counts.witness - bound
    if t <= 0:
        return 0.0
    return _exponent(t, r, counts.n, counts.m, counts.l)


def p_value(counts: TrialCounts, bound: float, r: Ranges) -> float:
    """Base-10 logarithm of the Hoeffding p-value (0 when there is no excess)."""
    return ln_p_value(counts, bound, r) / _LN10


def planned_log10_p(t: float, r: Ranges, n: int, m: int, l: int) -> float:  # noqa: E741
    """log10 p expected for an excess ``t`` with unequal trial counts."""
    if min(n, m, l) < 1:
        raise ValueError("trial counts must be at least 1")
    if t <= 0:
        return 0.0
    return _exponent(t, r, n, m, l) / _LN10


def min_trials(t: float, r: Ranges, target_log10_p: float = -10.0) -> int:
    """Smallest equal trial count ``n = m = l`` reaching ``target_log10_p``."""
    if not (math.isfinite(t) and t > 0):
        raise ValueError("the expected excess t must be positive")
    if target_log10_p >= 0:
        raise ValueError("target_log10_p must be negative")
    needed = (-target_log10_p * _LN10) * r.sum_of_squares / (18.0 * t * t)
    return max(1, math.ceil(needed))


def hoeffding_half_width(delta: float, count: int, confidence: float = 0.99) -> float:
    """Two-sided Hoeffding half-width of a sample mean of ``count`` scores in a range ``delta``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    return delta * math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * count))


def empirical_half_widths(
    counts: TrialCounts, confidence: float = 0.99
) -> tuple[float, float, float]:
    """Normal-approximation half-widths of o_bar, z_bar and s_bar from the sample variances."""
    if counts.o_var is None or counts.z_var is None or counts.s_var is None:
        raise ValueError("trial counts carry no sample variances")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    z = float(norm.ppf(0.5 + confidence / 2.0))
    return (
        z * math.sqrt(counts.o_var / counts.n),
        z * math.sqrt(counts.z_var / counts.m),
        z * math.sqrt(counts.s_var / counts.l),
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
