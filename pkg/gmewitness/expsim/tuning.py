"""Choice of the witness weights lambda and mu.

The violation ``o + z + s - bound - penalty`` is searched on a log-spaced
(lambda, mu) grid and the best cell is refined by Nelder-Mead in
(log lambda, log mu). The state enters only through
:class:`~gmewitness.expsim.evaluate.MeasuredStatistics`, so the grid is
scored without re-simulating.

For equal displacement amplitudes the bound surface over the grid comes
from the closed-form per-size bound, one lambda row at a time. Other
displacement boxes are scored with the dense bound at every grid cell,
which is only practical for small N.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from gmewitness.bisep import alpha_candidates, bisep_bound, uniform_partition_bounds
from gmewitness.common.models import DisplacementSpec, WitnessParams
from gmewitness.expsim.evaluate import (
    Conventions,
    MeasuredStatistics,
    ScenarioReport,
    measure,
    report_from_statistics,
)
from gmewitness.expsim.source import SourceModel, dark_penalty
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger
from gmewitness.utils.parallel import parallel_map

logger = get_logger("gmewitness.expsim.tuning")


@dataclass(frozen=True)
class TuningGrid:
    """Log-spaced search grid for lambda and mu."""

    lambda_min: float
    lambda_max: float
    lambda_points: int
    mu_min: float
    mu_max: float
    mu_points: int
    refine: bool = True

    def __post_init__(self) -> None:
        """Validate the grid."""
        if self.lambda_points < 1 or self.mu_points < 1:
            raise ValueError("tuning grid must not be empty")
        if not 0 < self.lambda_min <= self.lambda_max:
            raise ValueError("lambda range must satisfy 0 < min <= max")
        if not 0 < self.mu_min <= self.mu_max:
            raise ValueError("mu range must satisfy 0 < min <= max")

    @classmethod
    def from_settings(cls, points: int | None = None) -> TuningGrid:
        """Grid from ``TuningSettings``; ``points`` overrides both axis sizes."""
        settings = app_settings.tuning
        return cls(
            lambda_min=settings.lambda_min,
            lambda_max=settings.lambda_max,
            lambda_points=points or settings.lambda_points,
            mu_min=settings.mu_min,
            mu_max=settings.mu_max,
            mu_points=points or settings.mu_points,
            refine=settings.refine,
        )

    @property
    def lambdas(self) -> np.ndarray:
        """Lambda axis, ascending."""
        return np.geomspace(self.lambda_min, self.lambda_max, self.lambda_points)

    @property
    def mus(self) -> np.ndarray:
        """Mu axis, ascending."""
        return np.geomspace(self.mu_min, self.mu_max, self.mu_points)


@dataclass(frozen=True, eq=False)
class TuningResult:
    """Tuned weights, the full report at the optimum and the scored grid."""

    lam: float
    mu: float
    violation: float
    report: ScenarioReport
    grid: TuningGrid
    grid_violation: np.ndarray
    refined: bool

    @property
    def params(self) -> WitnessParams:
        """Tuned witness parameters."""
        return self.report.params


@lru_cache(maxsize=256)
def _uniform_bound_surface(
    n_parties: int, alphas: tuple[float, ...], lambdas: tuple[float, ...], mus: tuple[float, ...]
) -> np.ndarray:
    mu_arr = np.asarray(mus)
    surface = np.full((len(lambdas), len(mus)), -np.inf)
    for alpha in alphas:
        for row, lam in enumerate(lambdas):
            values, _ = uniform_partition_bounds(lam, mu_arr, alpha, n_parties)
            surface[row] = np.maximum(surface[row], values.max(axis=-1))
    surface.setflags(write=False)
    return surface


def _uniform_alphas(spec: DisplacementSpec) -> tuple[float, ...] | None:
    """Displacement values searched by the worst-case bound, if all points are equal-amplitude."""
    points, _ = alpha_candidates(spec)
    if all(len(set(point)) == 1 for point in points):
        return tuple(sorted({point[0] for point in points}))
    return None


def bound_surface(
    n_parties: int,
    spec: DisplacementSpec,
    lambdas: np.ndarray,
    mus: np.ndarray,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Worst-case biseparable bound on every (lambda, mu) cell of a grid."""
    conventions = conventions or Conventions()
    uniform = _uniform_alphas(spec)
    lam_key = tuple(float(v) for v in np.atleast_1d(lambdas))
    mu_key = tuple(float(v) for v in np.atleast_1d(mus))
    if uniform is not None:
        return _uniform_bound_surface(n_parties, uniform, lam_key, mu_key)

    points, _ = alpha_candidates(spec)
    cells = [(lam, mu) for lam in lam_key for mu in mu_key]
    logger.debug(
        f"Dense bound surface: {len(cells)} cells x {len(points)} displacement points"
    )

    def cell_bound(cell: tuple[float, float]) -> float:
        params = WitnessParams(n_parties, cell[0], cell[1])
        return max(
            bisep_bound(params, point, conventions.symmetric_bipartitions, workers=1).value
            for point in points
        )

    values = parallel_map(cell_bound, cells, workers)
    return np.asarray(values).reshape(len(lam_key), len(mu_key))


def violation_surface(
    stats: MeasuredStatistics,
    spec: DisplacementSpec,
    lambdas: np.ndarray,
    mus: np.ndarray,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Violation on a (lambda, mu) grid for fixed statistics."""
    n = stats.n_parties
    lam_g, mu_g = np.meshgrid(np.atleast_1d(lambdas), np.atleast_1d(mus), indexing="ij")
    witness = (
        stats.o
        + lam_g * stats.p0
        - stats.pair_silence
        - (n * (n - 1) + mu_g) * stats.multi_click
        - n * (n - 1) * stats.sigma
    )
    bounds = bound_surface(n, spec, lambdas, mus, conventions, workers)
    return witness - bounds - dark_penalty(n, stats.p_dc)


def tune_statistics(
    stats: MeasuredStatistics,
    spec: DisplacementSpec,
    grid: TuningGrid | None = None,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> TuningResult:
    """Tune lambda and mu for fixed statistics.

    Ties on the grid go to the smaller lambda, then the smaller mu.
    """
    grid = grid or TuningGrid.from_settings()
    conventions = conventions or Conventions()
    lambdas, mus = grid.lambdas, grid.mus
    surface = violation_surface(stats, spec, lambdas, mus, conventions, workers)
    # argmax returns the first maximum in row-major order: smallest lambda, then smallest mu
    row, col = np.unravel_index(int(np.argmax(surface)), surface.shape)
    lam, mu = float(lambdas[row]), float(mus[col])
    best = float(surface[row, col])

    refined = False
    if grid.refine:
        lam, mu, best, refined = _refine(stats, spec, grid, conventions, lam, mu, best)

    params = WitnessParams(stats.n_parties, lam, mu)
    report = report_from_statistics(stats, params, spec, conventions, workers=workers)
    logger.info(
        f"Tuned N={stats.n_parties}: lambda={lam:.6g}, mu={mu:.6g}, "
        f"violation {report.violation:.6g}{' (refined)' if refined else ''}"
    )
    return TuningResult(
        lam=lam,
        mu=mu,
        violation=report.violation,
        report=report,
        grid=grid,
        grid_violation=surface,
        refined=refined,
    )


def _refine(
    stats: MeasuredStatistics,
    spec: DisplacementSpec,
    grid: TuningGrid,
    conventions: Conventions,
    lam: float,
    mu: float,
    best: float,
) -> tuple[float, float, float, bool]:
    settings = app_settings.tuning
    bounds = [
        (np.log(grid.lambda_min), np.log(grid.lambda_max)),
        (np.log(grid.mu_min), np.log(grid.mu_max)),
    ]

    def objective(x: np.ndarray) -> float:
        lam_x, mu_x = np.exp(np.clip(x, [b[0] for b in bounds], [b[1] for b in bounds]))
        value = violation_surface(stats, spec, [lam_x], [mu_x], conventions, workers=1)
        return -float(value[0, 0])

    result = minimize(
        objective,
        x0=np.log([lam, mu]),
        method="Nelder-Mead",
        bounds=bounds,
        options={
            "xatol": settings.refine_xatol,
            "fatol": settings.refine_fatol,
            "maxiter": settings.refine_max_iter,
        },
    )
    candidate = -float(result.fun)
    logger.debug(
        f"Nelder-Mead refinement: {best:.9g} -> {candidate:.9g} in {result.nit} iterations"
    )
    if candidate > best:
        lam_r, mu_r = np.exp(result.x)
        return float(lam_r), float(mu_r), candidate, True
    return lam, mu, best, False


def tune_params(
    model: SourceModel,
    spec: DisplacementSpec,
    grid: TuningGrid | None = None,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> TuningResult:
    """Lambda and mu maximising the violation of a source model."""
    stats = measure(model, spec, conventions)
    return tune_statistics(stats, spec, grid, conventions, workers)


__all__ = [
    "TuningGrid",
    "TuningResult",
    "bound_surface",
    "tune_params",
    "tune_statistics",
    "violation_surface",
]
