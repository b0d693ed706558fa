"""Brute-force product-state maximisation of the relaxed witness.

Reference implementation for the eigenvalue method in
:mod:`gmewitness.bisep.bound`. The relaxed operator is assembled as a
dense matrix on the two-photon truncated space from no-click operators,
and its expectation is maximised over product states of the two groups
(each group holding at most one photon) by alternating top-eigenvector
updates from many random starts.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from gmewitness.bisep.partitions import Bipartition
from gmewitness.common.models import WitnessParams
from gmewitness.errors import DimensionGuardError
from gmewitness.fock import PhaseAveraging, basis_index, occupation_matrix
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger
from gmewitness.witness import m_restricted, o_operator, single_photon_indices

logger = get_logger("gmewitness.bisep.oracle")

_ORACLE_N_MAX = 2


def witness_tilde_operator(
    params: WitnessParams,
    alphas: Sequence[float] | np.ndarray,
    avg: PhaseAveraging | None = None,
) -> np.ndarray:
    """Dense relaxed witness ``(O_{n<=1} + M_{n<=1}) + (-mu E_{n>=2})`` at n_max = 2.

    The two-photon sector carries ``-mu`` on states with photons in two
    different modes and zero on doubly occupied single modes.
    """
    n = params.n_parties
    a_vec = np.asarray(alphas, dtype=float).ravel()
    if a_vec.size != n:
        raise ValueError(f"expected {n} displacement amplitudes, got {a_vec.size}")
    full_o = o_operator(n, _ORACLE_N_MAX, a_vec, avg).real
    low = single_photon_indices(n, _ORACLE_N_MAX)
    dim = full_o.shape[0]
    out = np.zeros((dim, dim))
    out[np.ix_(low, low)] = full_o[np.ix_(low, low)] + m_restricted(a_vec, params.lam)
    spread = np.nonzero((occupation_matrix(n, _ORACLE_N_MAX) > 0).sum(axis=1) >= 2)[0]
    out[spread, spread] = -params.mu
    return out


def _product_index(part: Bipartition) -> np.ndarray:
    """Basis index of |a-th G1 option> x |b-th G2 option>; option 0 is the vacuum."""
    n = part.n_parties
    index = basis_index(n, _ORACLE_N_MAX)
    table = np.empty((len(part.g1) + 1, len(part.g2) + 1), dtype=np.int64)
    for a in range(len(part.g1) + 1):
        for b in range(len(part.g2) + 1):
            occ = [0] * n
            if a:
                occ[part.g1[a - 1]] = 1
            if b:
                occ[part.g2[b - 1]] = 1
            table[a, b] = index[tuple(occ)]
    return table


def product_state_vector(
    part: Bipartition, v1: np.ndarray, v2: np.ndarray
) -> np.ndarray:
    """Full n_max = 2 amplitude vector of the product state ``v1 (G1) x v2 (G2)``."""
    table = _product_index(part)
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if v1.shape != (len(part.g1) + 1,) or v2.shape != (len(part.g2) + 1,):
        raise ValueError("group vectors must hold a vacuum amplitude plus one per mode")
    vec = np.zeros(len(basis_index(part.n_parties, _ORACLE_N_MAX)))
    vec[table.ravel()] = np.outer(v1, v2).ravel()
    return vec


def _top_vector(kernel: np.ndarray) -> np.ndarray:
    kernel = 0.5 * (kernel + kernel.T)
    return np.linalg.eigh(kernel)[1][:, -1]


def brute_force_bound(
    params: WitnessParams,
    alphas: Sequence[float] | np.ndarray,
    part: Bipartition,
    restarts: int | None = None,
    seed: int = 0,
    avg: PhaseAveraging | None = None,
) -> float:
    """Maximum of the relaxed witness over product states across ``part``.

    Raises:
        DimensionGuardError: Above ``BISEP__ORACLE_MAX_PARTIES`` parties.
    """
    settings = app_settings.bisep
    if part.n_parties > settings.oracle_max_parties:
        raise DimensionGuardError("product-state oracle", part.n_parties, settings.oracle_max_parties)
    if part.n_parties != params.n_parties:
        raise ValueError("partition and witness disagree on the number of parties")
    restarts = settings.oracle_restarts if restarts is None else restarts

    w = witness_tilde_operator(params, alphas, avg)
    table = _product_index(part)
    tensor = w[table[:, :, None, None], table[None, None, :, :]]
    d1, d2 = table.shape
    rng = np.random.default_rng(seed)

    def objective(v1: np.ndarray, v2: np.ndarray) -> float:
        return float(np.einsum("abcd,a,b,c,d->", tensor, v1, v2, v1, v2))

    best = -np.inf
    for attempt in range(restarts + 1):
        if attempt == 0:
            v1 = np.eye(d1)[0]
            v2 = np.eye(d2)[0]
        else:
            v1 = rng.standard_normal(d1)
            v2 = rng.standard_normal(d2)
            v1 /= np.linalg.norm(v1)
            v2 /= np.linalg.norm(v2)
        value = objective(v1, v2)
        for _ in range(settings.oracle_max_iter):
            v1 = _top_vector(np.einsum("abcd,b,d->ac", tensor, v2, v2))
            v2 = _top_vector(np.einsum("abcd,a,c->bd", tensor, v1, v1))
            new_value = objective(v1, v2)
            if new_value - value <= settings.oracle_tol:
                value = max(value, new_value)
                break
            value = new_value
        best = max(best, value)
    logger.debug(f"Oracle bound {best:.12g} for partition {part.label()} after {restarts} restarts")
    return best
