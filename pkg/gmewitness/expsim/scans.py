"""Scaling studies: violation against the number of parties, and the largest
certifiable party count against the transmission."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, replace

from gmewitness.common.models import DisplacementSpec, WitnessParams
from gmewitness.expsim.evaluate import Conventions, ScenarioReport, measure, report_from_statistics
from gmewitness.expsim.source import SourceModel
from gmewitness.expsim.tuning import TuningGrid, tune_statistics
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger
from gmewitness.utils.parallel import parallel_map

logger = get_logger("gmewitness.expsim.scans")


@dataclass(frozen=True)
class ScanPoint:
    """Tuned (or fixed-parameter) result for one party count."""

    n_parties: int
    lam: float
    mu: float
    witness: float
    bound: float
    dark_penalty: float
    violation: float
    p0: float
    p_star: float
    path: str

    @classmethod
    def from_report(cls, report: ScenarioReport) -> ScanPoint:
        """Flatten a scenario report."""
        return cls(
            n_parties=report.params.n_parties,
            lam=report.params.lam,
            mu=report.params.mu,
            witness=report.witness,
            bound=report.bound.value,
            dark_penalty=report.dark_penalty,
            violation=report.violation,
            p0=report.triple.p0,
            p_star=report.triple.p_star,
            path=report.path,
        )


@dataclass(frozen=True)
class EtaRow:
    """Largest violating party count for one (eta, p, p_dc) cell.

    ``n_max`` is ``None`` when not even two parties violate; ``capped``
    marks rows where the search stopped at the party-count cap.
    """

    eta: float
    p: float
    p_dc: float
    n_max: int | None
    violation_at_n_max: float | None
    capped: bool = False


def _scan_spec(n_parties: int, alpha: float, box: tuple[float, float] | None) -> DisplacementSpec:
    return DisplacementSpec.uniform(alpha, n_parties, box)


def evaluate_point(
    model: SourceModel,
    alpha: float | None = None,
    box: tuple[float, float] | None = None,
    params: WitnessParams | None = None,
    grid: TuningGrid | None = None,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> ScanPoint:
    """Tuned (``params=None``) or fixed-parameter result for a single model."""
    alpha = app_settings.scan.alpha if alpha is None else alpha
    spec = _scan_spec(model.n_parties, alpha, box)
    stats = measure(model, spec, conventions)
    if params is None:
        grid = grid or TuningGrid.from_settings(app_settings.scan.tune_points)
        report = tune_statistics(stats, spec, grid, conventions, workers).report
    else:
        report = report_from_statistics(stats, params, spec, conventions, workers=workers)
    return ScanPoint.from_report(report)


def scan_n(
    template: SourceModel,
    n_values: Sequence[int],
    alpha: float | None = None,
    box: tuple[float, float] | None = None,
    params: WitnessParams | None = None,
    grid: TuningGrid | None = None,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> list[ScanPoint]:
    """Violation as a function of the number of parties.

    ``params`` fixes lambda and mu for every N (its ``n_parties`` is
    replaced); ``None`` tunes per N.
    """
    cap = app_settings.scan.max_parties
    values = sorted({int(n) for n in n_values})
    if not values or values[0] < 2 or values[-1] > cap:
        raise ValueError(f"party counts must lie in 2..{cap}")

    def cell(n: int) -> ScanPoint:
        cell_params = None if params is None else WitnessParams(n, params.lam, params.mu)
        return evaluate_point(
            template.with_parties(n), alpha, box, cell_params, grid, conventions, workers=1
        )

    points = parallel_map(cell, values, workers)
    logger.info(
        f"Scan over N={values[0]}..{values[-1]}: last violating N = {last_violating(points)}"
    )
    return points


def last_violating(points: Sequence[ScanPoint]) -> int | None:
    """Largest N with a positive violation."""
    violating = [p.n_parties for p in points if p.violation > 0]
    return max(violating) if violating else None


def max_parties_for(
    template: SourceModel,
    alpha: float | None = None,
    box: tuple[float, float] | None = None,
    grid: TuningGrid | None = None,
    conventions: Conventions | None = None,
    n_start: int = 2,
    n_cap: int | None = None,
) -> EtaRow:
    """Increase N from ``n_start`` until the tuned violation is no longer positive."""
    n_cap = app_settings.scan.max_parties if n_cap is None else n_cap
    if n_start < 2 or n_cap < n_start:
        raise ValueError("need 2 <= n_start <= n_cap")
    best: ScanPoint | None = None
    for n in range(n_start, n_cap + 1):
        point = evaluate_point(
            template.with_parties(n), alpha, box, None, grid, conventions, workers=1
        )
        if point.violation <= 0:
            break
        best = point
    else:
        return EtaRow(
            template.eta, template.p, template.p_dc, n_cap, best.violation if best else None, True
        )
    return EtaRow(
        eta=template.eta,
        p=template.p,
        p_dc=template.p_dc,
        n_max=best.n_parties if best else None,
        violation_at_n_max=best.violation if best else None,
    )


def scan_eta(
    template: SourceModel,
    etas: Sequence[float],
    sources: Sequence[tuple[float, float]],
    alpha: float | None = None,
    box: tuple[float, float] | None = None,
    grid: TuningGrid | None = None,
    conventions: Conventions | None = None,
    n_cap: int | None = None,
    workers: int | None = None,
) -> list[EtaRow]:
    """Largest violating N for every transmission and every ``(p, p_dc)`` pair.

    Rows come back ordered by source pair, then by transmission.
    """
    if not etas:
        raise ValueError("eta grid must not be empty")
    if any(not 0.0 < eta <= 1.0 for eta in etas):
        raise ValueError("eta values must lie in (0, 1]")
    if not sources:
        raise ValueError("at least one (p, p_dc) pair is required")
    conventions = conventions or Conventions(path="reduced")
    cells = [
        replace(template.with_parties(2), p=p, p_dc=p_dc, eta=float(eta))
        for p, p_dc in sources
        for eta in etas
    ]
    rows = parallel_map(
        lambda model: max_parties_for(model, alpha, box, grid, conventions, n_cap=n_cap),
        cells,
        workers,
    )
    logger.info(f"Transmission scan: {len(rows)} cells")
    return rows


__all__ = [
    "EtaRow",
    "ScanPoint",
    "evaluate_point",
    "last_violating",
    "max_parties_for",
    "scan_eta",
    "scan_n",
]
