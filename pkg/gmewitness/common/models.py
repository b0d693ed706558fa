"""Core data models shared across the witness pipeline.

Frozen dataclasses validated in ``__post_init__``. They carry parameters
and results between the ``witness``, ``bisep``, ``expsim`` and ``stats``
packages without those packages importing each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

SigmaConvention = Literal["conservative", "paper-tables"]
SIGMA_CONVENTIONS: tuple[str, ...] = ("conservative", "paper-tables")


def sigma_multiplier(convention: SigmaConvention) -> float:
    """Factor between the per-mode coincidence and the p_i* estimate used."""
    if convention == "conservative":
        return 2.0
    if convention == "paper-tables":
        return 1.0
    raise ValueError(
        f"Unknown sigma convention '{convention}'. Expected one of {SIGMA_CONVENTIONS}"
    )


@dataclass(frozen=True)
class WitnessParams:
    """Witness parameters: party count N and the weights lambda, mu."""

    n_parties: int
    lam: float
    mu: float

    def __post_init__(self) -> None:
        """Validate parameter ranges."""
        if self.n_parties < 2:
            raise ValueError("n_parties must be at least 2")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lambda must be a positive finite number")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError("mu must be a positive finite number")


@dataclass(frozen=True)
class DisplacementSpec:
    """Per-mode displacement amplitudes: nominal values and a box [lower, upper].

    The box is the calibration uncertainty of the displacement; it is
    degenerate when ``lower == upper == nominal`` on every mode.
    """

    nominal: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate shapes and ordering of the box."""
        n = len(self.nominal)
        if n == 0:
            raise ValueError("DisplacementSpec needs at least one mode")
        if len(self.lower) != n or len(self.upper) != n:
            raise ValueError("nominal, lower and upper must have the same length")
        for i, (lo, a, hi) in enumerate(zip(self.lower, self.nominal, self.upper)):
            if not all(math.isfinite(v) for v in (lo, a, hi)):
                raise ValueError(f"alpha box of mode {i} must be finite")
            if lo < 0:
                raise ValueError(f"alpha box of mode {i} must be non-negative")
            if lo > hi:
                raise ValueError(f"alpha box of mode {i} is inverted: [{lo}, {hi}]")
            if not lo <= a <= hi:
                raise ValueError(
                    f"nominal alpha {a} of mode {i} lies outside its box [{lo}, {hi}]"
                )

    @classmethod
    def uniform(
        cls,
        alpha: float,
        n_modes: int,
        box: tuple[float, float] | None = None,
    ) -> DisplacementSpec:
        """Same nominal amplitude and box on every mode."""
        lo, hi = box if box is not None else (alpha, alpha)
        return cls(
            nominal=(float(alpha),) * n_modes,
            lower=(float(lo),) * n_modes,
            upper=(float(hi),) * n_modes,
        )

    @classmethod
    def degenerate(cls, alphas: tuple[float, ...] | list[float]) -> DisplacementSpec:
        """Exactly known amplitudes."""
        values = tuple(float(a) for a in alphas)
        return cls(nominal=values, lower=values, upper=values)

    @property
    def n_modes(self) -> int:
        """Number of modes."""
        return len(self.nominal)

    @cached_property
    def nominal_array(self) -> np.ndarray:
        """Nominal amplitudes as an array."""
        return np.asarray(self.nominal, dtype=float)

    @property
    def is_degenerate(self) -> bool:
        """True when no mode has a non-trivial interval."""
        return self.lower == self.upper

    @property
    def is_uniform(self) -> bool:
        """True when every mode carries the same nominal value and box."""
        return (
            len(set(self.nominal)) == 1
            and len(set(self.lower)) == 1
            and len(set(self.upper)) == 1
        )

    @property
    def fluctuating_modes(self) -> tuple[int, ...]:
        """Indices of modes with a non-degenerate interval."""
        return tuple(
            i for i, (lo, hi) in enumerate(zip(self.lower, self.upper)) if lo < hi
        )

    def restrict(self, modes: tuple[int, ...] | list[int]) -> DisplacementSpec:
        """Spec of a sub-collection of modes."""
        return DisplacementSpec(
            nominal=tuple(self.nominal[i] for i in modes),
            lower=tuple(self.lower[i] for i in modes),
            upper=tuple(self.upper[i] for i in modes),
        )


@dataclass(frozen=True)
class ObservableTriple:
    """Expected (or estimated) values of the three measured observables."""

    o: float
    z: float
    s: float
    p0: float
    p_star: float
    sigma_convention: SigmaConvention = "conservative"

    def __post_init__(self) -> None:
        """Validate signs."""
        if self.s > 0:
            raise ValueError("s must be non-positive")
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError("p0 must lie in [0, 1]")

    @property
    def witness(self) -> float:
        """The measured witness value o + z + s."""
        return self.o + self.z + self.s


@dataclass(frozen=True)
class TrialCounts:
    """Sample means of the three observables and the trial counts behind them.

    ``n``, ``m``, ``l`` are the numbers of trials spent on O, Z and S.
    Variances are the empirical per-trial variances when the counts come
    from simulation, ``None`` for published rows.
    """

    o_bar: float
    z_bar: float
    s_bar: float
    n: int
    m: int
    l: int  # noqa: E741
    n_parties: int | None = None
    seed: int | None = None
    o_var: float | None = None
    z_var: float | None = None
    s_var: float | None = None

    def __post_init__(self) -> None:
        """Validate counts and the ranges the means can take."""
        for name in ("n", "m", "l"):
            if getattr(self, name) < 1:
                raise ValueError(f"trial count '{name}' must be at least 1")
        if self.s_bar > 0:
            raise ValueError("s_bar must be non-positive")
        if self.n_parties is not None:
            lo = -float(self.n_parties)
            hi = float(self.n_parties * (self.n_parties - 1))
            if not lo - 1e-9 <= self.o_bar <= hi + 1e-9:
                raise ValueError(f"o_bar must lie in [{lo}, {hi}]")

    @property
    def total(self) -> int:
        """Total number of trials n + m + l."""
        return self.n + self.m + self.l

    @property
    def witness(self) -> float:
        """Estimated witness value."""
        return self.o_bar + self.z_bar + self.s_bar
