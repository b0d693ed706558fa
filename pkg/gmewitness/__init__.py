"""Scalable witness of genuine multipartite entanglement for single-photon W states.

Exact truncated Fock-space simulation of the measured click statistics,
the biseparable bound of the witness, Hoeffding certification and
dark-count-corrected scaling studies.
"""

from gmewitness.__version__ import __version__
from gmewitness.bisep import BoundResult, bound_for_partition, worst_case_bound
from gmewitness.common.models import DisplacementSpec, ObservableTriple, TrialCounts, WitnessParams
from gmewitness.expsim import SourceModel, evaluate, make_state, sample_trials, tune_params
from gmewitness.fock import TruncatedState, w_state
from gmewitness.stats import min_trials, p_value, ranges
from gmewitness.witness import witness_value

__all__ = [
    "__version__",
    "BoundResult",
    "DisplacementSpec",
    "ObservableTriple",
    "SourceModel",
    "TrialCounts",
    "TruncatedState",
    "WitnessParams",
    "bound_for_partition",
    "evaluate",
    "make_state",
    "min_trials",
    "p_value",
    "ranges",
    "sample_trials",
    "tune_params",
    "w_state",
    "witness_value",
    "worst_case_bound",
]
