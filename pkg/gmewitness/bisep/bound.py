"""Biseparable bound of the relaxed witness.

For a bipartition (G2 | G1) and a mixing angle ``a`` the relaxed witness
restricted to product states with at most one photon per group reduces
to the top eigenvalue of the N x N matrix

    M(a) = [[cos^2 a B_22 - mu sin^2 a 1,  cos a sin a B_21        ],
            [cos a sin a B_12,              sin^2 a B_11 + lam cos^2 a 1]]

with ``B_kk = 2 h_k sum_{i != k} f_i`` and ``B_kl = 2 g_k g_l``. The bound
is the maximum over ``a`` in [0, pi/2], over bipartitions and over the
calibration box of the displacement amplitudes.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from gmewitness.bisep.partitions import Bipartition, enumerate_bipartitions
from gmewitness.common.models import DisplacementSpec, WitnessParams
from gmewitness.errors import DimensionGuardError
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger
from gmewitness.utils.parallel import parallel_map
from gmewitness.witness.coefficients import fgh

logger = get_logger("gmewitness.bisep.bound")

_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


class AngleOptimum(NamedTuple):
    """Maximum over the mixing angle and where it is attained."""

    value: float
    angle: float


@dataclass(frozen=True)
class PartitionValue:
    """Bound of a single bipartition at a fixed displacement.

    ``grid_slack`` is the Lipschitz estimate ``L h / 2`` of how far the
    angle grid alone could miss the maximum; refinement closes most of it.
    """

    partition: Bipartition
    value: float
    angle: float
    grid_slack: float = 0.0


@dataclass(frozen=True)
class BoundResult:
    """Worst-case biseparable bound and where it is attained."""

    value: float
    partition: Bipartition
    angle: float
    alpha: tuple[float, ...]
    per_partition: tuple[PartitionValue, ...]
    alpha_strategy: str = "degenerate"
    alpha_points: int = 1

    def __post_init__(self) -> None:
        """Check that the reported argmax is consistent with the table."""
        if not self.per_partition:
            raise ValueError("BoundResult needs at least one partition value")
        best = max(p.value for p in self.per_partition)
        if abs(best - self.value) > 1e-12 * max(1.0, abs(best)):
            raise ValueError("value must equal the maximum over per_partition")


def base_matrix(alphas: Sequence[float] | np.ndarray) -> np.ndarray:
    """Coupling matrix B of the single-photon sector."""
    a = np.asarray(alphas, dtype=float).ravel()
    if a.size < 2:
        raise ValueError("at least two modes are required")
    f, g, h = fgh(a)
    base = 2.0 * np.outer(g, g)
    np.fill_diagonal(base, 2.0 * h * (f.sum() - f))
    return base


def _m_stack(
    params: WitnessParams, permuted: np.ndarray, k: int, angles: np.ndarray
) -> np.ndarray:
    """Matrices M(a) for every angle, shape (len(angles), N, N)."""
    n = permuted.shape[0]
    c = np.cos(angles)[:, None, None]
    s = np.sin(angles)[:, None, None]
    eye_k = np.eye(k)
    eye_l = np.eye(n - k)
    out = np.empty((angles.size, n, n))
    out[:, :k, :k] = c**2 * permuted[:k, :k] - params.mu * s**2 * eye_k
    out[:, :k, k:] = c * s * permuted[:k, k:]
    out[:, k:, :k] = c * s * permuted[k:, :k]
    out[:, k:, k:] = s**2 * permuted[k:, k:] + params.lam * c**2 * eye_l
    return out


def build_m(
    params: WitnessParams,
    alphas: Sequence[float] | np.ndarray,
    part: Bipartition,
    a: float,
) -> np.ndarray:
    """M(lam, mu, alpha, a) with rows ordered G2 block first, then G1."""
    a_vec = np.asarray(alphas, dtype=float).ravel()
    if a_vec.size != part.n_parties or params.n_parties != part.n_parties:
        raise ValueError("alphas, params and partition disagree on the number of parties")
    if not np.isfinite(a):
        raise ValueError("angle must be finite")
    base = base_matrix(a_vec)
    permuted = base[np.ix_(part.order, part.order)]
    return _m_stack(params, permuted, len(part.g2), np.array([float(a)]))[0]


def max_eig(matrix: np.ndarray) -> float:
    """Largest eigenvalue of a real symmetric matrix."""
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError("matrix must be square")
    if np.max(np.abs(mat - mat.T), initial=0.0) > 1e-12:
        raise ValueError("matrix must be symmetric within 1e-12")
    return float(np.linalg.eigvalsh(mat)[-1])


def golden_section_max(
    fn: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    xtol: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised golden-section search for the maximum of ``fn`` on each [lo, hi].

    ``fn`` maps an array of abscissae (same shape as ``lo``) to values.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    while np.max(hi - lo, initial=0.0) > xtol:
        right = f1 < f2
        lo = np.where(right, x1, lo)
        hi = np.where(right, hi, x2)
        probe = np.where(right, lo + _INV_PHI * (hi - lo), hi - _INV_PHI * (hi - lo))
        fp = fn(probe)
        x1, x2, f1, f2 = (
            np.where(right, x2, probe),
            np.where(right, probe, x1),
            np.where(right, f2, fp),
            np.where(right, fp, f1),
        )
    x_mid = 0.5 * (lo + hi)
    f_mid = fn(x_mid)
    best_x = np.where(f1 >= f2, x1, x2)
    best_f = np.maximum(f1, f2)
    take_mid = f_mid >= best_f
    return np.where(take_mid, x_mid, best_x), np.where(take_mid, f_mid, best_f)


def _angle_grid() -> tuple[np.ndarray, float]:
    points = app_settings.bisep.angle_grid_points
    grid = np.linspace(0.0, np.pi / 2.0, points)
    return grid, grid[1] - grid[0]


def _optimize_angle(
    params: WitnessParams, alphas: np.ndarray, part: Bipartition
) -> PartitionValue:
    base = base_matrix(alphas)
    permuted = base[np.ix_(part.order, part.order)]
    k = len(part.g2)

    def top(angles: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(angles).ravel()
        vals = np.linalg.eigvalsh(_m_stack(params, permuted, k, flat))[:, -1]
        return vals.reshape(np.shape(angles))

    grid, step = _angle_grid()
    values = top(grid)
    slack = float(np.max(np.abs(np.diff(values)), initial=0.0)) / 2.0

    # Local maxima of the sampled curve, best first
    padded = np.concatenate([[-np.inf], values, [-np.inf]])
    peaks = np.nonzero((values >= padded[:-2]) & (values >= padded[2:]))[0]
    peaks = peaks[np.argsort(-values[peaks], kind="stable")][: app_settings.bisep.refine_candidates]
    lo = np.maximum(grid[peaks] - step, 0.0)
    hi = np.minimum(grid[peaks] + step, np.pi / 2.0)
    xs, fs = golden_section_max(top, lo, hi, app_settings.bisep.angle_xtol)

    best_idx = int(np.argmax(values))
    best_value, best_angle = float(values[best_idx]), float(grid[best_idx])
    for x, fx in zip(xs.tolist(), fs.tolist()):
        if fx > best_value:
            best_value, best_angle = fx, x
    logger.debug(
        f"Partition {part.label()}: bound {best_value:.12g} at a={best_angle:.6f}, grid slack {slack:.2e}"
    )
    return PartitionValue(part, best_value, best_angle, slack)


def bound_for_partition(
    params: WitnessParams, alphas: Sequence[float] | np.ndarray, part: Bipartition
) -> AngleOptimum:
    """Maximum over ``a`` in [0, pi/2] of the top eigenvalue of M for one bipartition."""
    a_vec = np.asarray(alphas, dtype=float).ravel()
    if a_vec.size != part.n_parties or params.n_parties != part.n_parties:
        raise ValueError("alphas, params and partition disagree on the number of parties")
    result = _optimize_angle(params, a_vec, part)
    return AngleOptimum(result.value, result.angle)


def _uniform_top(lam, mu, c, d, k, l, a):  # noqa: E741
    cos2, sin2 = np.cos(a) ** 2, np.sin(a) ** 2
    cross = np.cos(a) * np.sin(a) * d * np.sqrt(k * l)
    a11 = cos2 * (c + d * (k - 1)) - mu * sin2
    a22 = sin2 * (c + d * (l - 1)) + lam * cos2
    top = 0.5 * (a11 + a22) + np.sqrt((0.5 * (a11 - a22)) ** 2 + cross**2)
    top = np.maximum(top, np.where(k >= 2, cos2 * (c - d) - mu * sin2, -np.inf))
    top = np.maximum(top, np.where(l >= 2, sin2 * (c - d) + lam * cos2, -np.inf))
    return top


def uniform_partition_bounds(
    lam: float | np.ndarray,
    mu: float | np.ndarray,
    alpha: float,
    n_parties: int,
    g1_sizes: Sequence[int] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-size bounds for equal amplitudes, vectorised over ``lam`` and ``mu``.

    With equal amplitudes ``B = c 1 + d (J - 1)``, so M(a) splits into a
    2 x 2 block on the group-uniform vectors and two scalar blocks on
    their orthogonal complements.

    Returns:
        ``(values, angles)`` of shape ``broadcast(lam, mu).shape + (P,)``
        where P indexes ``g1_sizes`` (default ``1..floor(N/2)``).
    """
    if n_parties < 2:
        raise ValueError("n_parties must be at least 2")
    sizes = np.asarray(
        g1_sizes if g1_sizes is not None else range(1, n_parties // 2 + 1), dtype=float
    )
    if np.any(sizes < 1) or np.any(sizes > n_parties - 1):
        raise ValueError("G1 sizes must lie in 1..N-1")
    lam_b, mu_b = np.broadcast_arrays(
        np.asarray(lam, dtype=float), np.asarray(mu, dtype=float)
    )
    if np.any(lam_b <= 0) or np.any(mu_b <= 0):
        raise ValueError("lambda and mu must be positive")
    f, g, h = fgh(float(alpha))
    c = 2.0 * (n_parties - 1) * f * h
    d = 2.0 * g * g
    l_sizes = sizes
    k_sizes = n_parties - sizes

    grid, step = _angle_grid()
    lam_g, mu_g = lam_b[..., None, None], mu_b[..., None, None]
    values = _uniform_top(lam_g, mu_g, c, d, k_sizes[:, None], l_sizes[:, None], grid)
    idx = np.argmax(values, axis=-1)
    grid_best = np.take_along_axis(values, idx[..., None], axis=-1)[..., 0]
    centre = grid[idx]
    lo = np.maximum(centre - step, 0.0)
    hi = np.minimum(centre + step, np.pi / 2.0)

    lam_p, mu_p = lam_b[..., None], mu_b[..., None]

    def top(x: np.ndarray) -> np.ndarray:
        return _uniform_top(lam_p, mu_p, c, d, k_sizes, l_sizes, x)

    xs, fs = golden_section_max(top, lo, hi, app_settings.bisep.angle_xtol)
    better = fs > grid_best
    return np.where(better, fs, grid_best), np.where(better, xs, centre)


def _is_uniform(alphas: np.ndarray) -> bool:
    return bool(np.all(alphas == alphas[0]))


def bisep_bound(
    params: WitnessParams,
    alphas: Sequence[float] | np.ndarray,
    symmetric: bool | None = None,
    workers: int | None = None,
) -> BoundResult:
    """Bound at a fixed displacement, maximised over bipartitions.

    ``symmetric=None`` uses the one-representative-per-size reduction
    exactly when all amplitudes are equal.
    """
    a_vec = np.asarray(alphas, dtype=float).ravel()
    n = params.n_parties
    if a_vec.size != n:
        raise ValueError(f"expected {n} displacement amplitudes, got {a_vec.size}")
    uniform = _is_uniform(a_vec)
    use_symmetric = uniform if symmetric is None else symmetric
    if use_symmetric and not uniform:
        logger.warning(
            "Symmetric bipartition reduction requested for unequal amplitudes; enumerating all splits"
        )
        use_symmetric = False

    if use_symmetric:
        values, angles = uniform_partition_bounds(params.lam, params.mu, float(a_vec[0]), n)
        table = tuple(
            PartitionValue(Bipartition(n, tuple(range(1, size + 1))), float(v), float(a))
            for size, v, a in zip(range(1, n // 2 + 1), values.tolist(), angles.tolist())
        )
    else:
        parts = enumerate_bipartitions(n, symmetric=False)
        table = tuple(
            parallel_map(lambda p: _optimize_angle(params, a_vec, p), parts, workers)
        )

    best = table[0]
    for row in table[1:]:
        if row.value > best.value:
            best = row
    return BoundResult(
        value=best.value,
        partition=best.partition,
        angle=best.angle,
        alpha=tuple(a_vec.tolist()),
        per_partition=table,
    )


def alpha_candidates(spec: DisplacementSpec) -> tuple[list[tuple[float, ...]], str]:
    """Displacement points searched for the worst case, and the strategy name.

    Raises:
        DimensionGuardError: When corner enumeration of a non-uniform box
            exceeds ``BISEP__MAX_BOX_CORNERS``.
    """
    settings = app_settings.bisep
    nominal = tuple(spec.nominal)
    fluctuating = spec.fluctuating_modes
    if not fluctuating:
        return [nominal], "degenerate"

    def with_values(values: Sequence[float]) -> tuple[float, ...]:
        point = list(nominal)
        for mode, value in zip(fluctuating, values):
            point[mode] = float(value)
        return tuple(point)

    if len(fluctuating) <= settings.max_box_grid_modes:
        axes = [
            np.linspace(spec.lower[i], spec.upper[i], settings.box_grid_points)
            for i in fluctuating
        ]
        points = [with_values(v) for v in itertools.product(*axes)]
        strategy = "grid"
    elif 2 ** len(fluctuating) <= settings.max_box_corners:
        axes = [(spec.lower[i], spec.upper[i]) for i in fluctuating]
        points = [with_values(v) for v in itertools.product(*axes)]
        strategy = "corners"
        logger.warning(
            f"Alpha box has {len(fluctuating)} fluctuating modes; searching corners only"
        )
    elif spec.is_uniform:
        axis = np.linspace(spec.lower[0], spec.upper[0], settings.box_grid_points)
        points = [(float(v),) * spec.n_modes for v in axis]
        strategy = "uniform-diagonal"
        logger.warning(
            "Alpha box too large for corner enumeration; searching equal-amplitude points only"
        )
    else:
        raise DimensionGuardError(
            "alpha-box corner enumeration", 2 ** len(fluctuating), settings.max_box_corners
        )
    if nominal not in points:
        points.insert(0, nominal)
    return points, strategy


def worst_case_bound(
    params: WitnessParams,
    spec: DisplacementSpec,
    symmetric: bool | None = None,
    workers: int | None = None,
) -> BoundResult:
    """Bound maximised over bipartitions and over the displacement box."""
    if spec.n_modes != params.n_parties:
        raise ValueError("displacement spec and witness disagree on the number of parties")
    points, strategy = alpha_candidates(spec)
    if len(points) == 1:
        results = [bisep_bound(params, points[0], symmetric, workers)]
    else:
        results = parallel_map(
            lambda point: bisep_bound(params, point, symmetric, workers=1), points, workers
        )
    best = results[0]
    for result in results[1:]:
        if result.value > best.value:
            best = result
    logger.info(
        f"Biseparable bound {best.value:.6f} for N={params.n_parties} "
        f"(lambda={params.lam:g}, mu={params.mu:g}, {strategy}, {len(points)} alpha points)"
    )
    return BoundResult(
        value=best.value,
        partition=best.partition,
        angle=best.angle,
        alpha=best.alpha,
        per_partition=best.per_partition,
        alpha_strategy=strategy,
        alpha_points=len(points),
    )
