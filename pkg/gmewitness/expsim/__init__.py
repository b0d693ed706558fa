"""Experiment simulation: source model, evaluation, trials, tuning, subsets and scans."""

from .evaluate import (
    Conventions,
    MeasuredStatistics,
    ScenarioReport,
    evaluate,
    evaluate_state,
    measure,
    measure_state,
    pair_marginal,
    report_from_statistics,
    resolve_path,
    score,
)
from .scans import EtaRow, ScanPoint, evaluate_point, last_violating, max_parties_for, scan_eta, scan_n
from .source import (
    SourceModel,
    dark_penalty,
    heralded_populations,
    lossy_source_mode,
    make_state,
    source_photon_weights,
)
from .subsets import SubsetRow, enumerate_subsets, subset_analysis
from .trials import PatternDistribution, pattern_distributions, sample_outcomes, sample_trials
from .tuning import TuningGrid, TuningResult, bound_surface, tune_params, tune_statistics, violation_surface

__all__ = [
    # Source
    "SourceModel",
    "dark_penalty",
    "heralded_populations",
    "lossy_source_mode",
    "make_state",
    "source_photon_weights",
    # Evaluation
    "Conventions",
    "MeasuredStatistics",
    "ScenarioReport",
    "evaluate",
    "evaluate_state",
    "measure",
    "measure_state",
    "pair_marginal",
    "report_from_statistics",
    "resolve_path",
    "score",
    # Trials
    "PatternDistribution",
    "pattern_distributions",
    "sample_outcomes",
    "sample_trials",
    # Tuning
    "TuningGrid",
    "TuningResult",
    "bound_surface",
    "tune_params",
    "tune_statistics",
    "violation_surface",
    # Subsets and scans
    "EtaRow",
    "ScanPoint",
    "SubsetRow",
    "enumerate_subsets",
    "evaluate_point",
    "last_violating",
    "max_parties_for",
    "scan_eta",
    "scan_n",
    "subset_analysis",
]
