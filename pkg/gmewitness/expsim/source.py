"""Heralded single-photon source feeding an N-port splitter.

The heralded mode carries ``(|1><1| + p |2><2|) / (1 + p)``. Heralds
fired by dark counts of the heralding detector announce vacuum, so a
fraction ``d`` of the trials starts from ``|0>``. The mode then suffers
loss ``eta`` and is split over the N parties; optional per-party
transmissions act after the splitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from gmewitness.fock import TruncatedState, apply_loss, split_weighted
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger

logger = get_logger("gmewitness.expsim.source")

_SOURCE_N_MAX = 2


@dataclass(frozen=True)
class SourceModel:
    """Heralded source, loss and splitter of an N-party experiment.

    Attributes:
        n_parties: Number of output modes N
        p: Relative two-photon weight of the heralded mode
        eta: Overall transmission applied before the splitter
        p_dc: Dark-count probability of each party detector per herald
        herald_dark_fraction: Fraction d of heralds caused by heralding-detector dark counts
        per_mode_eta: Optional transmission of each party after the splitter
        split_weights: Optional intensity weights of the splitter outputs (sum 1)
        n_max: Photon-number truncation of the simulated states (at least 2)
    """

    n_parties: int
    p: float = 0.0
    eta: float = 1.0
    p_dc: float = 0.0
    herald_dark_fraction: float = 0.0
    per_mode_eta: tuple[float, ...] | None = None
    split_weights: tuple[float, ...] | None = None
    n_max: int = _SOURCE_N_MAX

    def __post_init__(self) -> None:
        """Validate ranges and vector lengths."""
        if self.n_max < _SOURCE_N_MAX:
            raise ValueError(f"n_max must be at least {_SOURCE_N_MAX} to hold the two-photon term")
        if self.n_parties < 1:
            raise ValueError("n_parties must be at least 1")
        if not (math.isfinite(self.p) and self.p >= 0):
            raise ValueError("p must be a non-negative finite number")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not 0.0 <= self.p_dc <= 1.0:
            raise ValueError("p_dc must lie in [0, 1]")
        if not 0.0 <= self.herald_dark_fraction < 1.0:
            raise ValueError("herald_dark_fraction must lie in [0, 1)")
        if self.per_mode_eta is not None:
            if len(self.per_mode_eta) != self.n_parties:
                raise ValueError("per_mode_eta needs one transmission per party")
            if any(not 0.0 <= e <= 1.0 for e in self.per_mode_eta):
                raise ValueError("per_mode_eta entries must lie in [0, 1]")
        if self.split_weights is not None:
            if len(self.split_weights) != self.n_parties:
                raise ValueError("split_weights needs one weight per party")
            if any(w < 0 for w in self.split_weights):
                raise ValueError("split_weights must be non-negative")
            if abs(sum(self.split_weights) - 1.0) > 1e-12:
                raise ValueError("split_weights must sum to 1")

    @classmethod
    def experiment_like(
        cls,
        n_parties: int,
        p: float,
        eta: float,
        p_dc: float = 0.0,
        herald_dark_fraction: float | None = None,
    ) -> SourceModel:
        """Balanced model with the heralding-dark admixture of the reference setup."""
        if herald_dark_fraction is None:
            herald_dark_fraction = app_settings.simulation.experiment_herald_dark_fraction
        return cls(
            n_parties=n_parties,
            p=p,
            eta=eta,
            p_dc=p_dc,
            herald_dark_fraction=herald_dark_fraction,
        )

    @property
    def is_symmetric(self) -> bool:
        """True when every party sees the same transmission and splitter weight."""
        weights_equal = self.split_weights is None or len(set(self.split_weights)) == 1
        etas_equal = self.per_mode_eta is None or len(set(self.per_mode_eta)) == 1
        return weights_equal and etas_equal

    def with_parties(self, n_parties: int) -> SourceModel:
        """Same source with a different number of parties (balanced models only)."""
        if self.per_mode_eta is not None or self.split_weights is not None:
            raise ValueError("only balanced models can be rescaled to another party count")
        return SourceModel(
            n_parties=n_parties,
            p=self.p,
            eta=self.eta,
            p_dc=self.p_dc,
            herald_dark_fraction=self.herald_dark_fraction,
            n_max=self.n_max,
        )


def heralded_populations(model: SourceModel) -> np.ndarray:
    """Photon-number populations of the heralded mode, herald darks included."""
    d = model.herald_dark_fraction
    norm = 1.0 + model.p
    return np.array([d, (1.0 - d) / norm, (1.0 - d) * model.p / norm])


def source_photon_weights(model: SourceModel) -> tuple[float, float, float]:
    """Populations ``(w0, w1, w2)`` of the heralded mode after the overall loss."""
    _, q1, q2 = heralded_populations(model)
    eta = model.eta
    w2 = q2 * eta * eta
    w1 = q1 * eta + 2.0 * q2 * eta * (1.0 - eta)
    return max(0.0, 1.0 - w1 - w2), w1, w2


def lossy_source_mode(model: SourceModel) -> TruncatedState:
    """Single-mode state entering the splitter, padded to the model truncation."""
    populations = np.zeros(model.n_max + 1)
    populations[:3] = source_photon_weights(model)
    return TruncatedState.single_mode(populations)


def make_state(model: SourceModel) -> TruncatedState:
    """N-mode state received by the parties.

    Raises:
        DimensionGuardError: When the N-mode basis exceeds ``FOCK__MAX_BASIS_SIZE``.
    """
    weights = (
        np.asarray(model.split_weights, dtype=float)
        if model.split_weights is not None
        else np.full(model.n_parties, 1.0 / model.n_parties)
    )
    state = split_weighted(lossy_source_mode(model), weights)
    if model.per_mode_eta is not None:
        state = apply_loss(state, model.per_mode_eta)
    logger.debug(
        f"Source state for N={model.n_parties} (p={model.p:g}, eta={model.eta:g}, "
        f"d={model.herald_dark_fraction:.4g}), dimension {state.dim}"
    )
    return state


def dark_penalty(n_parties: int, p_dc: float) -> float:
    """Dark-count correction ``2 N^2 (N - 1) p_dc`` subtracted from the violation."""
    if not 0.0 <= p_dc <= 1.0:
        raise ValueError("p_dc must lie in [0, 1]")
    if n_parties < 1:
        raise ValueError("n_parties must be at least 1")
    return 2.0 * n_parties**2 * (n_parties - 1) * p_dc


__all__ = [
    "SourceModel",
    "dark_penalty",
    "heralded_populations",
    "lossy_source_mode",
    "make_state",
    "source_photon_weights",
]
