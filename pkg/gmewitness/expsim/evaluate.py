"""End-to-end evaluation of a source model against the witness.

Evaluation is split in two stages. :func:`measure` reduces the state to
the handful of numbers the witness needs, none of which depend on the
weights lambda and mu. :func:`score` turns those numbers into an
:class:`~gmewitness.common.models.ObservableTriple` for a given
parameter choice, so tuning re-scores without re-simulating.

Two evaluation paths exist:

* ``exact``: the full N-mode state is built (N <= ``FOCK__MAX_PATTERN_MODES``)
* ``reduced``: for balanced models only the two-mode marginal is built,
  from a three-port split ``(1/N, 1/N, 1 - 2/N)`` with the last port
  traced out; click numbers follow from the photon-number populations
  of the source mode
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from gmewitness.bisep import BoundResult, worst_case_bound
from gmewitness.common.models import (
    DisplacementSpec,
    ObservableTriple,
    SigmaConvention,
    WitnessParams,
    sigma_multiplier,
)
from gmewitness.expsim.source import (
    SourceModel,
    dark_penalty,
    lossy_source_mode,
    make_state,
)
from gmewitness.fock import (
    PhaseAveraging,
    TruncatedState,
    add_dark_clicks,
    apply_loss,
    click_number_distribution,
    partial_trace,
    split_weighted,
    vacuum_pair_table,
)
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger
from gmewitness.witness import (
    correlators,
    expected_o,
    f_coeffs,
    local_multiphoton,
    operator_witness_expectation,
    sigma_expectation,
)

logger = get_logger("gmewitness.expsim.evaluate")

EvaluationPath = Literal["auto", "exact", "reduced"]


def _default_sigma_convention() -> SigmaConvention:
    return app_settings.simulation.sigma_convention


@dataclass(frozen=True)
class Conventions:
    """Choices that change how measured statistics become a witness value.

    Attributes:
        sigma_convention: Estimator of the local multi-photon probability
        symmetric_bipartitions: Bipartition reduction; ``None`` decides from the amplitudes
        phase_averaging: Common-phase averaging of the displacement
        path: ``auto`` picks ``exact`` up to ``FOCK__MAX_PATTERN_MODES`` parties
        local_symmetric: Probe the coincidence rate on mode 0 only and scale by N
    """

    sigma_convention: SigmaConvention = field(default_factory=_default_sigma_convention)
    symmetric_bipartitions: bool | None = None
    phase_averaging: PhaseAveraging = field(default_factory=PhaseAveraging)
    path: EvaluationPath = "auto"
    local_symmetric: bool = True

    def __post_init__(self) -> None:
        """Validate the enumerated choices."""
        sigma_multiplier(self.sigma_convention)
        if self.path not in ("auto", "exact", "reduced"):
            raise ValueError(f"Unknown evaluation path '{self.path}'")


@dataclass(frozen=True, eq=False)
class MeasuredStatistics:
    """Witness-relevant statistics of a state, independent of lambda and mu.

    Attributes:
        n_parties: Number of parties N
        path: Evaluation path that produced the numbers
        o: Expected value of the displaced correlator sum
        p_click: Probability of n undisplaced clicks, n = 0..N
        pair_silence: ``sum_{i != j} F_ij P(i and j silent)``
        p_cc: Coincidence probability after splitting mode 0
        sigma: Estimate of the summed local multi-photon probability
        p_dc: Dark-count probability folded into the numbers
        sigma_convention: Convention behind ``sigma``
    """

    n_parties: int
    path: str
    o: float
    p_click: np.ndarray
    pair_silence: float
    p_cc: float
    sigma: float
    p_dc: float
    sigma_convention: SigmaConvention

    @property
    def p0(self) -> float:
        """Probability that no detector clicks."""
        return float(self.p_click[0])

    @property
    def multi_click(self) -> float:
        """Probability of two or more clicks."""
        return float(max(0.0, 1.0 - self.p_click[0] - self.p_click[1]))

    @property
    def p_star(self) -> float:
        """Upper bound on the probability of two or more photons."""
        return float(min(1.0, self.multi_click + self.sigma))


@dataclass(frozen=True)
class ScenarioReport:
    """Witness value, bound and violation of one scenario."""

    params: WitnessParams
    triple: ObservableTriple
    bound: BoundResult
    dark_penalty: float
    violation: float
    path: str
    p_click: tuple[float, ...]
    p_cc: float
    operator_expectation: float | None = None

    def __post_init__(self) -> None:
        """Check the reported numbers are usable."""
        if not np.isfinite(self.violation):
            raise ValueError("violation must be finite")
        if self.dark_penalty < 0:
            raise ValueError("dark_penalty must be non-negative")

    @property
    def bound_with_pstar(self) -> float:
        """Alternative bound form that adds ``N (N - 1) p_*`` to the biseparable bound."""
        n = self.params.n_parties
        return self.bound.value + n * (n - 1) * self.triple.p_star

    @property
    def witness(self) -> float:
        """Measured witness value o + z + s."""
        return self.triple.witness


def _f_pair_sum(spec: DisplacementSpec, pairs: np.ndarray) -> float:
    f = f_coeffs(spec).copy()
    np.fill_diagonal(f, 0.0)
    return float(np.sum(f * pairs))


def measure_state(
    state: TruncatedState,
    spec: DisplacementSpec,
    conventions: Conventions | None = None,
    p_dc: float = 0.0,
) -> MeasuredStatistics:
    """Statistics of an explicit N-mode state (exact path)."""
    conventions = conventions or Conventions()
    if spec.n_modes != state.n_modes:
        raise ValueError("displacement spec and state disagree on the number of modes")
    o = expected_o(state, spec.nominal_array, conventions.phase_averaging, p_dc)
    p_click = click_number_distribution(state, p_dc)
    pair_silence = _f_pair_sum(spec, vacuum_pair_table(state, p_dc))
    p_cc = local_multiphoton(state, 0, p_dc)[0]
    sigma = sigma_expectation(
        state, conventions.sigma_convention, conventions.local_symmetric, p_dc
    )
    return MeasuredStatistics(
        n_parties=state.n_modes,
        path="exact",
        o=o,
        p_click=p_click,
        pair_silence=pair_silence,
        p_cc=p_cc,
        sigma=sigma,
        p_dc=p_dc,
        sigma_convention=conventions.sigma_convention,
    )


def pair_marginal(model: SourceModel) -> TruncatedState:
    """Two-mode marginal of parties 0 and 1 of a balanced model."""
    if not model.is_symmetric:
        raise ValueError("the reduced path needs equal transmissions and splitter weights")
    n = model.n_parties
    if n < 2:
        raise ValueError("the reduced path needs at least two parties")
    mode = lossy_source_mode(model)
    if model.per_mode_eta is not None:
        mode = apply_loss(mode, model.per_mode_eta[0])
    if n == 2:
        return split_weighted(mode, [0.5, 0.5])
    three = split_weighted(mode, [1.0 / n, 1.0 / n, 1.0 - 2.0 / n])
    return partial_trace(three, [0, 1])


def _occupied_modes_distribution(populations: np.ndarray, n: int) -> np.ndarray:
    """Number of occupied parties when 0, 1 or 2 photons are spread uniformly."""
    w0, w1, w2 = (list(populations) + [0.0, 0.0])[:3]
    dist = np.zeros(n + 1)
    dist[0] = w0
    dist[1] = w1 + w2 / n
    dist[2] += w2 * (n - 1) / n
    return dist


def _reduced_statistics(
    model: SourceModel, spec: DisplacementSpec, conventions: Conventions
) -> MeasuredStatistics:
    if not spec.is_uniform:
        raise ValueError("the reduced path needs the same displacement on every party")
    n = model.n_parties
    pair = pair_marginal(model)
    alpha = spec.nominal[0]
    corr = correlators(pair, [alpha, alpha], conventions.phase_averaging, model.p_dc)
    mode = lossy_source_mode(model)
    if model.per_mode_eta is not None:
        mode = apply_loss(mode, model.per_mode_eta[0])
    occupied = _occupied_modes_distribution(mode.photon_number_distribution(), n)
    p_click = add_dark_clicks(occupied, model.p_dc)
    silent_pair = vacuum_pair_table(pair, model.p_dc)[0, 1]
    f = f_coeffs(spec)
    f_offdiag_sum = float(f.sum() - np.trace(f))
    p_cc = local_multiphoton(pair, 0, model.p_dc)[0]
    sigma = n * sigma_multiplier(conventions.sigma_convention) * p_cc
    return MeasuredStatistics(
        n_parties=n,
        path="reduced",
        o=float(n * (n - 1) * corr[0, 1]),
        p_click=p_click,
        pair_silence=f_offdiag_sum * float(silent_pair),
        p_cc=p_cc,
        sigma=sigma,
        p_dc=model.p_dc,
        sigma_convention=conventions.sigma_convention,
    )


def resolve_path(model: SourceModel, conventions: Conventions) -> str:
    """Concrete evaluation path for a model.

    Raises:
        ValueError: When an unbalanced model is too large for the exact path.
    """
    guard = app_settings.fock.max_pattern_modes
    if conventions.path == "exact":
        return "exact"
    if conventions.path == "reduced":
        return "reduced"
    if model.n_parties <= guard:
        return "exact"
    if not model.is_symmetric:
        raise ValueError(
            f"unbalanced models above {guard} parties cannot use the reduced path "
            "(per_mode_eta and split_weights must be uniform)"
        )
    return "reduced"


def measure(
    model: SourceModel,
    spec: DisplacementSpec,
    conventions: Conventions | None = None,
) -> MeasuredStatistics:
    """Statistics of the state produced by ``model``."""
    conventions = conventions or Conventions()
    if spec.n_modes != model.n_parties:
        raise ValueError("displacement spec and source model disagree on the number of parties")
    path = resolve_path(model, conventions)
    if path == "reduced":
        return _reduced_statistics(model, spec, conventions)
    return measure_state(make_state(model), spec, conventions, model.p_dc)


def score(stats: MeasuredStatistics, params: WitnessParams) -> ObservableTriple:
    """Expected observables for a parameter choice."""
    n = params.n_parties
    if n != stats.n_parties:
        raise ValueError("statistics and witness disagree on the number of parties")
    z = (
        params.lam * stats.p0
        - stats.pair_silence
        - (n * (n - 1) + params.mu) * stats.multi_click
    )
    return ObservableTriple(
        o=stats.o,
        z=float(z),
        s=-n * (n - 1) * stats.sigma,
        p0=stats.p0,
        p_star=stats.p_star,
        sigma_convention=stats.sigma_convention,
    )


def report_from_statistics(
    stats: MeasuredStatistics,
    params: WitnessParams,
    spec: DisplacementSpec,
    conventions: Conventions | None = None,
    bound: BoundResult | None = None,
    operator_expectation: float | None = None,
    workers: int | None = None,
) -> ScenarioReport:
    """Score statistics, compute (or reuse) the bound and assemble the report."""
    conventions = conventions or Conventions()
    triple = score(stats, params)
    if bound is None:
        bound = worst_case_bound(params, spec, conventions.symmetric_bipartitions, workers)
    penalty = dark_penalty(params.n_parties, stats.p_dc)
    violation = triple.witness - bound.value - penalty
    p_click = tuple(float(v) for v in np.pad(stats.p_click, (0, 4))[:4])
    return ScenarioReport(
        params=params,
        triple=triple,
        bound=bound,
        dark_penalty=penalty,
        violation=float(violation),
        path=stats.path,
        p_click=p_click,
        p_cc=stats.p_cc,
        operator_expectation=operator_expectation,
    )


def _check_consistent(n: int, params: WitnessParams, spec: DisplacementSpec) -> None:
    if params.n_parties != n or spec.n_modes != n:
        raise ValueError(
            f"inconsistent party counts: state {n}, witness {params.n_parties}, "
            f"displacement {spec.n_modes}"
        )


def evaluate_state(
    state: TruncatedState,
    params: WitnessParams,
    spec: DisplacementSpec,
    conventions: Conventions | None = None,
    p_dc: float = 0.0,
    workers: int | None = None,
) -> ScenarioReport:
    """Report for an explicit state (exact path)."""
    conventions = conventions or Conventions()
    _check_consistent(state.n_modes, params, spec)
    stats = measure_state(state, spec, conventions, p_dc)
    operator = operator_witness_expectation(
        state, params, spec.nominal_array, conventions.phase_averaging
    )
    return report_from_statistics(
        stats, params, spec, conventions, operator_expectation=operator, workers=workers
    )


def evaluate(
    model: SourceModel,
    params: WitnessParams,
    spec: DisplacementSpec,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> ScenarioReport:
    """Witness value, worst-case bound, dark-count penalty and violation of a model."""
    conventions = conventions or Conventions()
    _check_consistent(model.n_parties, params, spec)
    path = resolve_path(model, conventions)
    if path == "exact":
        report = evaluate_state(
            make_state(model), params, spec, conventions, model.p_dc, workers
        )
    else:
        stats = _reduced_statistics(model, spec, conventions)
        report = report_from_statistics(stats, params, spec, conventions, workers=workers)
    logger.info(
        f"N={model.n_parties} {report.path}: witness {report.witness:.6f}, "
        f"bound {report.bound.value:.6f}, violation {report.violation:.6f}"
    )
    return report


__all__ = [
    "Conventions",
    "EvaluationPath",
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
]
