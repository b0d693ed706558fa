"""Witness analysis of every subset of at least two parties.

The discarded parties are traced out and the remaining n-party state is
treated as an n-partite experiment in its own right: its own witness
weights, its own worst-case bound and its own dark-count penalty.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import combinations

from gmewitness.bisep import BoundResult, worst_case_bound
from gmewitness.common.models import DisplacementSpec, TrialCounts, WitnessParams
from gmewitness.errors import DimensionGuardError
from gmewitness.expsim.evaluate import (
    Conventions,
    measure_state,
    report_from_statistics,
)
from gmewitness.expsim.source import SourceModel, make_state
from gmewitness.expsim.tuning import TuningGrid, tune_statistics
from gmewitness.fock import partial_trace
from gmewitness.settings import app_settings
from gmewitness.stats import p_value, ranges
from gmewitness.utils.logging import get_logger
from gmewitness.utils.parallel import parallel_map
from gmewitness.witness import f_coeffs

logger = get_logger("gmewitness.expsim.subsets")


@dataclass(frozen=True)
class SubsetRow:
    """Result for one subset of parties (0-based mode indices)."""

    modes: tuple[int, ...]
    lam: float
    mu: float
    witness: float
    bound: float
    dark_penalty: float
    violation: float
    one_minus_p0: float
    log10_p: float | None = None

    @property
    def size(self) -> int:
        """Number of parties in the subset."""
        return len(self.modes)


def enumerate_subsets(n_parties: int, min_size: int = 2) -> list[tuple[int, ...]]:
    """All subsets of ``range(n_parties)`` with at least ``min_size`` members, by size then lexicographically."""
    return [
        subset
        for size in range(min_size, n_parties + 1)
        for subset in combinations(range(n_parties), size)
    ]


def subset_analysis(
    model: SourceModel,
    spec: DisplacementSpec,
    params: Mapping[int, WitnessParams] | None = None,
    conventions: Conventions | None = None,
    counts: tuple[int, int, int] | None = None,
    grid: TuningGrid | None = None,
    workers: int | None = None,
) -> list[SubsetRow]:
    """Violation of every subset of two or more parties.

    Args:
        model: Source model of the full experiment
        spec: Displacement of the full experiment; restricted per subset
        params: Witness parameters per subset size; ``None`` tunes each size
            on its lexicographically first subset
        conventions: Evaluation conventions
        counts: Trial numbers ``(n, m, l)`` for a Hoeffding p-value per subset
        grid: Tuning grid used when ``params`` is ``None``
        workers: Worker threads

    Raises:
        DimensionGuardError: Above ``FOCK__MAX_PATTERN_MODES`` parties.
    """
    conventions = conventions or Conventions()
    guard = app_settings.fock.max_pattern_modes
    if model.n_parties > guard:
        raise DimensionGuardError("subset analysis", model.n_parties, guard)
    if spec.n_modes != model.n_parties:
        raise ValueError("displacement spec and source model disagree on the number of parties")
    state = make_state(model)
    subsets = enumerate_subsets(model.n_parties)

    def measure_subset(modes: tuple[int, ...]):
        reduced = partial_trace(state, modes)
        return measure_state(reduced, spec.restrict(modes), conventions, model.p_dc)

    stats = parallel_map(measure_subset, subsets, workers)

    chosen: dict[int, WitnessParams] = {}
    for modes, subset_stats in zip(subsets, stats):
        size = len(modes)
        if size in chosen:
            continue
        if params is not None:
            if size not in params:
                raise ValueError(f"no witness parameters given for subsets of size {size}")
            chosen[size] = params[size]
        else:
            tuned = tune_statistics(subset_stats, spec.restrict(modes), grid, conventions, workers)
            chosen[size] = tuned.params

    bounds: dict[tuple, BoundResult] = {}

    def bound_for(modes: tuple[int, ...]) -> BoundResult:
        sub_spec = spec.restrict(modes)
        key = (len(modes), sub_spec.nominal, sub_spec.lower, sub_spec.upper)
        if key not in bounds:
            bounds[key] = worst_case_bound(
                chosen[len(modes)], sub_spec, conventions.symmetric_bipartitions, workers
            )
        return bounds[key]

    rows = []
    for modes, subset_stats in zip(subsets, stats):
        size = len(modes)
        sub_spec = spec.restrict(modes)
        report = report_from_statistics(
            subset_stats, chosen[size], sub_spec, conventions, bound=bound_for(modes)
        )
        log10_p = None
        if counts is not None:
            trial_counts = TrialCounts(
                o_bar=report.triple.o,
                z_bar=report.triple.z,
                s_bar=report.triple.s,
                n=counts[0],
                m=counts[1],
                l=counts[2],
            )
            r = ranges(chosen[size], f_coeffs(sub_spec), conventions.sigma_convention)
            log10_p = p_value(trial_counts, report.bound.value + report.dark_penalty, r)
        rows.append(
            SubsetRow(
                modes=modes,
                lam=chosen[size].lam,
                mu=chosen[size].mu,
                witness=report.witness,
                bound=report.bound.value,
                dark_penalty=report.dark_penalty,
                violation=report.violation,
                one_minus_p0=1.0 - report.triple.p0,
                log10_p=log10_p,
            )
        )
    logger.info(
        f"Subset analysis of N={model.n_parties}: {len(rows)} subsets, "
        f"{sum(r.violation > 0 for r in rows)} violating"
    )
    return rows


__all__ = ["SubsetRow", "enumerate_subsets", "subset_analysis"]
