"""Truncated Fock-space states, linear-optics channels and displaced on/off detection."""

from .basis import (
    basis_index,
    basis_size,
    coherent_amplitude_table,
    coherent_overlap,
    enumerate_basis,
    occupation_matrix,
)
from .channels import (
    apply_loss,
    partial_trace,
    split_balanced,
    split_weighted,
    splitter_isometry,
)
from .detection import (
    NO_AVERAGING,
    ClickStats,
    add_dark_clicks,
    PhaseAveraging,
    click_number_distribution,
    click_stats,
    fold_detector_efficiency,
    noclick_operator,
    noclick_set_prob,
    noclick_table,
    pair_noclick_table,
    vacuum_pair_table,
    with_dark_counts,
)
from .state import TruncatedState, w_state

__all__ = [
    # Basis
    "basis_index",
    "basis_size",
    "coherent_amplitude_table",
    "coherent_overlap",
    "enumerate_basis",
    "occupation_matrix",
    # States
    "TruncatedState",
    "w_state",
    # Channels
    "apply_loss",
    "partial_trace",
    "split_balanced",
    "split_weighted",
    "splitter_isometry",
    # Detection
    "NO_AVERAGING",
    "ClickStats",
    "add_dark_clicks",
    "PhaseAveraging",
    "click_number_distribution",
    "click_stats",
    "fold_detector_efficiency",
    "noclick_operator",
    "noclick_set_prob",
    "noclick_table",
    "pair_noclick_table",
    "vacuum_pair_table",
    "with_dark_counts",
]
