"""Displaced on/off detection on truncated states.

A detector preceded by a displacement ``alpha`` stays silent with POVM
element ``|alpha><alpha|``. A common random phase over all modes is
modelled by averaging over the K equispaced phases ``2 pi k / K``. With
``K >= 2 n_max + 1`` this reproduces the continuous average exactly:
coherences between total-photon sectors are removed and nothing else is.

Two evaluation routes exist:

* direct, per subset: the dense no-click operator traced against rho;
* all subsets at once (N <= ``FOCK__MAX_PATTERN_MODES``): every subset
  probability is written as ``sum_{V subset of T} C_V * prod_{i in T \\ V} e_i``
  with ``e_i = exp(-|alpha_i|^2)``. The coefficients ``C_V`` are
  accumulated once from the nonzero entries of rho, then a weighted
  subset-sum (zeta) transform produces the whole table in O(N 2^N). A superset
  Moebius transform turns no-click sets into exact click patterns.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import binom

from gmewitness.errors import ConsistencyError, DimensionGuardError
from gmewitness.fock.basis import coherent_amplitude_table, occupation_matrix
from gmewitness.fock.state import TruncatedState
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger

logger = get_logger("gmewitness.fock.detection")


@dataclass(frozen=True)
class PhaseAveraging:
    """Common-phase averaging of the displacement.

    ``points`` is the number of quadrature phases K; ``None`` selects
    ``2 n_max + 1``, the smallest exact choice.
    """

    enabled: bool = True
    points: int | None = None

    def __post_init__(self) -> None:
        """Validate the quadrature size."""
        if self.points is not None and self.points < 1:
            raise ValueError("phase-averaging points must be positive")

    def n_points(self, n_max: int) -> int:
        """Quadrature size K for a truncation ``n_max``."""
        if not self.enabled:
            return 1
        k = self.points if self.points is not None else 2 * n_max + 1
        if k < 2 * n_max + 1:
            raise ValueError(
                f"phase averaging needs at least {2 * n_max + 1} points at n_max={n_max}, got {k}"
            )
        return k

    def sector_weight(self, delta: np.ndarray, n_max: int) -> np.ndarray:
        """Average of ``exp(i delta phi_k)`` over the quadrature phases."""
        delta = np.asarray(delta)
        if not self.enabled:
            return np.ones(delta.shape)
        k = self.n_points(n_max)
        return (np.mod(delta, k) == 0).astype(float)


NO_AVERAGING = PhaseAveraging(enabled=False)


def fold_detector_efficiency(alpha: complex | np.ndarray, eta: float | np.ndarray):
    """Displacement seen by the state when detector loss is moved onto it.

    A detector of efficiency eta behind a displacement alpha is equivalent to
    loss eta on the state followed by an ideal detector displaced by alpha sqrt(eta).
    """
    eta = np.asarray(eta, dtype=float)
    if np.any(eta < 0) or np.any(eta > 1):
        raise ValueError("efficiency must lie in [0, 1]")
    return np.asarray(alpha) * np.sqrt(eta)


def _check_dark_probability(p_dc: float) -> None:
    if not 0.0 <= p_dc <= 1.0:
        raise ValueError("dark-count probability must lie in [0, 1]")


def _validated_probability(value: float, what: str) -> float:
    tol = app_settings.fock.probability_tol
    if not np.isfinite(value) or value < -tol or value > 1.0 + tol:
        raise ConsistencyError(f"{what} = {value!r} is outside [0, 1]")
    return float(min(max(value, 0.0), 1.0))


def _validated_array(values: np.ndarray, what: str) -> np.ndarray:
    tol = app_settings.fock.probability_tol
    if not np.all(np.isfinite(values)):
        raise ConsistencyError(f"{what} contains non-finite entries")
    lo, hi = float(values.min(initial=0.0)), float(values.max(initial=0.0))
    if lo < -tol or hi > 1.0 + tol:
        raise ConsistencyError(f"{what} has entries outside [0, 1] (min {lo:.3e}, max {hi:.3e})")
    return np.clip(values, 0.0, 1.0)


def _alphas_array(alphas: Sequence[complex] | np.ndarray | None, n_modes: int) -> np.ndarray:
    if alphas is None:
        return np.zeros(n_modes, dtype=complex)
    arr = np.asarray(alphas, dtype=complex).ravel()
    if arr.size == 1 and n_modes > 1:
        arr = np.full(n_modes, arr[0])
    if arr.shape != (n_modes,):
        raise ValueError(f"expected {n_modes} displacement amplitudes, got {arr.size}")
    return arr


def _subset_mask(subset: Iterable[int], n_modes: int) -> np.ndarray:
    mask = np.zeros(n_modes, dtype=bool)
    for i in subset:
        i = int(i)
        if not 0 <= i < n_modes:
            raise ValueError(f"mode index {i} outside range({n_modes})")
        mask[i] = True
    return mask


def _same_rest(occ: np.ndarray, in_subset: np.ndarray) -> np.ndarray:
    rest = occ[:, ~in_subset]
    if rest.shape[1] == 0:
        return np.ones((occ.shape[0], occ.shape[0]), dtype=bool)
    _, labels = np.unique(rest, axis=0, return_inverse=True)
    labels = labels.ravel()
    return labels[:, None] == labels[None, :]


def noclick_operator(
    n_modes: int,
    n_max: int,
    subset: Iterable[int],
    alphas: Sequence[complex] | np.ndarray | None = None,
    avg: PhaseAveraging | None = None,
) -> np.ndarray:
    """Dense matrix of ``prod_{i in S} |alpha_i><alpha_i|`` (identity elsewhere), phase averaged."""
    avg = avg or PhaseAveraging()
    mask = _subset_mask(subset, n_modes)
    betas = _alphas_array(alphas, n_modes)
    occ = occupation_matrix(n_modes, n_max)
    amps = coherent_amplitude_table(betas, n_max)
    u = np.ones(occ.shape[0], dtype=complex)
    for i in np.nonzero(mask)[0]:
        u = u * amps[i, occ[:, i]]
    n_sub = occ[:, mask].sum(axis=1)
    weight = avg.sector_weight(n_sub[:, None] - n_sub[None, :], n_max)
    return np.outer(u, u.conj()) * _same_rest(occ, mask) * weight


def noclick_set_prob(
    state: TruncatedState,
    subset: Iterable[int],
    alphas: Sequence[complex] | np.ndarray | None = None,
    avg: PhaseAveraging | None = None,
    p_dc: float = 0.0,
) -> float:
    """Probability that every detector in ``subset`` stays silent."""
    _check_dark_probability(p_dc)
    subset = list(subset)
    op = noclick_operator(state.n_modes, state.n_max, subset, alphas, avg)
    value = np.sum(op * state.matrix.T)
    if abs(value.imag) > 1e-9:
        raise ConsistencyError(f"no-click probability has imaginary part {value.imag:.3e}")
    dark = (1.0 - p_dc) ** len(set(subset))
    return _validated_probability(float(value.real) * dark, "no-click probability")


def _popcounts(n_modes: int) -> np.ndarray:
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n_modes):
        counts = np.concatenate([counts, counts + 1])
    return counts


def _weighted_zeta_subsets(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``out[T] = sum_{V subset of T} values[V] * prod_{i in T \\ V} weights[i]``."""
    out = values.copy()
    for i, w in enumerate(weights):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] += w * view[:, 0, :]
    return out


def _moebius_supersets(values: np.ndarray, n_modes: int) -> np.ndarray:
    """Inverse of the superset-sum transform: exact-set values from superset sums."""
    out = values.copy()
    for i in range(n_modes):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 0, :] -= view[:, 1, :]
    return out


def _check_pattern_guard(n_modes: int) -> None:
    limit = app_settings.fock.max_pattern_modes
    if n_modes > limit:
        raise DimensionGuardError("click-pattern table", 2**n_modes, 2**limit)


def noclick_table(
    state: TruncatedState,
    alphas: Sequence[complex] | np.ndarray | None = None,
    avg: PhaseAveraging | None = None,
) -> np.ndarray:
    """No-click probability of every subset, indexed by bitmask (bit i = mode i).

    Dark counts are not included.
    """
    n = state.n_modes
    _check_pattern_guard(n)
    avg = avg or PhaseAveraging()
    betas = _alphas_array(alphas, n)
    amps = coherent_amplitude_table(betas, state.n_max)
    # Per-mode projector onto the displaced vacuum, split as e * 1 + shifted
    projector = amps[:, :, None] * amps[:, None, :].conj()
    e = projector[:, 0, 0].real
    shifted = projector - e[:, None, None] * np.eye(state.n_max + 1)[None, :, :]

    occ = state.occupations
    rho = state.matrix
    totals = state.total_photons
    if np.all(betas == 0):
        rows = cols = np.nonzero(rho.diagonal() != 0)[0]
    else:
        weight = avg.sector_weight(totals[:, None] - totals[None, :], state.n_max)
        rows, cols = np.nonzero((rho.T != 0) & (weight != 0))
    # (rows, cols) index (m, m') with the contribution rho[m', m]

    occ_rows = occ.tolist()
    occupied = [frozenset(i for i, v in enumerate(row) if v) for row in occ_rows]
    shifted_list = shifted.tolist()
    coeff = np.zeros(1 << n, dtype=complex)
    for p, q in zip(rows.tolist(), cols.tolist()):
        m, mp = occ_rows[p], occ_rows[q]
        mask = 0
        value = complex(rho[q, p])
        free: list[tuple[int, complex]] = []
        for i in sorted(occupied[p] | occupied[q]):
            d = shifted_list[i][m[i]][mp[i]]
            if m[i] != mp[i]:
                mask |= 1 << i
                value *= d
            elif d != 0:
                free.append((1 << i, d))
        if value == 0:
            continue
        coeff[mask] += value
        for size in range(1, len(free) + 1):
            for chosen in combinations(free, size):
                bits = mask
                val = value
                for bit, d in chosen:
                    bits |= bit
                    val *= d
                coeff[bits] += val

    table = _weighted_zeta_subsets(coeff, e)
    if np.max(np.abs(table.imag), initial=0.0) > 1e-9:
        raise ConsistencyError("no-click table has a non-negligible imaginary part")
    logger.debug(f"No-click table over {n} modes from {len(rows)} density-matrix entries")
    return _validated_array(table.real, "no-click table")


@dataclass(frozen=True, eq=False)
class ClickStats:
    """Joint click statistics of N displaced on/off detectors.

    * ``noclick[S]``: probability that all detectors of the bitmask S stay silent
    * ``patterns[C]``: probability that exactly the detectors of the bitmask C click
    * ``per_n_click[n]``: probability of exactly n clicks
    * ``pair_vacuum[i, j]``: no-click probability of {i, j}; the diagonal holds singles
    """

    n_modes: int
    noclick: np.ndarray
    patterns: np.ndarray
    per_n_click: np.ndarray
    pair_vacuum: np.ndarray
    p_dc: float = 0.0

    @staticmethod
    def to_mask(modes: Iterable[int]) -> int:
        """Bitmask of a collection of mode indices."""
        mask = 0
        for i in modes:
            mask |= 1 << int(i)
        return mask

    def noclick_set_prob(self, subset: Iterable[int]) -> float:
        """No-click probability of a subset."""
        return float(self.noclick[self.to_mask(subset)])

    def pattern_prob(self, clicks: Iterable[int]) -> float:
        """Probability that exactly the given detectors click."""
        return float(self.patterns[self.to_mask(clicks)])

    @property
    def p0(self) -> float:
        """Probability of no click at all."""
        return float(self.per_n_click[0])

    @property
    def multi_click(self) -> float:
        """Probability of two or more clicks."""
        return float(max(0.0, 1.0 - self.per_n_click[0] - self.per_n_click[1]))


def _stats_from_noclick(n_modes: int, noclick: np.ndarray, p_dc: float) -> ClickStats:
    silent_exact = _validated_array(_moebius_supersets(noclick, n_modes), "click patterns")
    patterns = silent_exact[::-1].copy()
    per_n = np.bincount(_popcounts(n_modes), weights=patterns, minlength=n_modes + 1)
    pair = np.empty((n_modes, n_modes))
    for i in range(n_modes):
        for j in range(n_modes):
            pair[i, j] = noclick[(1 << i) | (1 << j)]
    return ClickStats(n_modes, noclick, patterns, per_n, pair, p_dc)


def click_stats(
    state: TruncatedState,
    alphas: Sequence[complex] | np.ndarray | None = None,
    avg: PhaseAveraging | None = None,
    p_dc: float = 0.0,
) -> ClickStats:
    """All subset no-click probabilities and click patterns, with dark counts.

    Raises:
        DimensionGuardError: For more than ``FOCK__MAX_PATTERN_MODES`` modes.
    """
    _check_dark_probability(p_dc)
    table = noclick_table(state, alphas, avg)
    table = table * (1.0 - p_dc) ** _popcounts(state.n_modes)
    return _stats_from_noclick(state.n_modes, table, p_dc)


def with_dark_counts(stats: ClickStats, p_dc: float) -> ClickStats:
    """Apply independent dark counts of probability ``p_dc`` per detector to existing statistics."""
    _check_dark_probability(p_dc)
    table = stats.noclick * (1.0 - p_dc) ** _popcounts(stats.n_modes)
    combined = 1.0 - (1.0 - stats.p_dc) * (1.0 - p_dc)
    return _stats_from_noclick(stats.n_modes, table, combined)


def click_number_distribution(state: TruncatedState, p_dc: float = 0.0) -> np.ndarray:
    """Probability of n clicks without displacement, for any N.

    Without displacement a detector clicks iff its mode is occupied; dark
    counts add a binomial number of clicks on the empty modes.
    """
    n = state.n_modes
    occupied = (state.occupations > 0).sum(axis=1)
    by_occupied = np.bincount(occupied, weights=state.populations, minlength=n + 1)
    return add_dark_clicks(by_occupied, p_dc)


def add_dark_clicks(by_occupied: np.ndarray, p_dc: float) -> np.ndarray:
    """Click-number distribution from the distribution of occupied modes.

    Each of the ``N - k`` empty detectors fires independently with ``p_dc``.
    """
    _check_dark_probability(p_dc)
    by_occupied = np.asarray(by_occupied, dtype=float)
    n = by_occupied.size - 1
    if p_dc == 0.0:
        dist = by_occupied.copy()
    else:
        dist = np.zeros(n + 1)
        for k, weight in enumerate(by_occupied):
            if weight == 0:
                continue
            extra = np.arange(n - k + 1)
            dist[k:] += weight * binom.pmf(extra, n - k, p_dc)
    return _validated_array(dist, "click-number distribution")


def vacuum_pair_table(state: TruncatedState, p_dc: float = 0.0) -> np.ndarray:
    """No-click probabilities of all pairs (diagonal: singles) without displacement."""
    empty = (state.occupations == 0).astype(float)
    table = empty.T @ (state.populations[:, None] * empty)
    dark = np.full(table.shape, (1.0 - p_dc) ** 2)
    np.fill_diagonal(dark, 1.0 - p_dc)
    return _validated_array(table * dark, "pair no-click table")


def pair_noclick_table(
    state: TruncatedState,
    alphas: Sequence[complex] | np.ndarray | None = None,
    avg: PhaseAveraging | None = None,
    p_dc: float = 0.0,
) -> np.ndarray:
    """Displaced no-click probabilities of all pairs (diagonal: singles), any N."""
    n = state.n_modes
    table = np.empty((n, n))
    for i in range(n):
        table[i, i] = noclick_set_prob(state, [i], alphas, avg, p_dc)
        for j in range(i + 1, n):
            table[i, j] = table[j, i] = noclick_set_prob(state, [i, j], alphas, avg, p_dc)
    return table
