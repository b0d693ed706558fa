"""Linear-optics channels on truncated states: loss, splitters, partial trace."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.special import comb, factorial

from gmewitness.fock.basis import basis_index, enumerate_basis, occupation_matrix
from gmewitness.fock.state import TruncatedState


def _per_mode_eta(eta: float | Sequence[float], n_modes: int) -> np.ndarray:
    etas = np.broadcast_to(np.asarray(eta, dtype=float), (n_modes,)).copy()
    if etas.shape != (n_modes,):
        raise ValueError(f"expected one efficiency per mode ({n_modes})")
    if np.any(etas < 0) or np.any(etas > 1):
        raise ValueError("efficiencies must lie in [0, 1]")
    return etas


def loss_kraus_operators(state_modes: int, n_max: int, mode: int, eta: float) -> list[np.ndarray]:
    """Binomial Kraus operators of a pure-loss channel on one mode.

    ``A_k = sum_n sqrt(C(n, k) eta^(n-k) (1-eta)^k) |n-k><n|`` acting on
    ``mode`` and as the identity elsewhere.
    """
    occ = occupation_matrix(state_modes, n_max)
    index = basis_index(state_modes, n_max)
    dim = occ.shape[0]
    n_here = occ[:, mode]
    operators = []
    for k in range(int(n_here.max(initial=0)) + 1):
        op = np.zeros((dim, dim))
        for src in np.nonzero(n_here >= k)[0]:
            n = int(n_here[src])
            target = list(occ[src])
            target[mode] -= k
            amp = np.sqrt(comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
            if amp != 0.0:
                op[index[tuple(target)], src] = amp
        operators.append(op)
    return operators


def apply_loss(state: TruncatedState, eta: float | Sequence[float]) -> TruncatedState:
    """Independent pure loss of transmission ``eta`` (scalar or per mode) on every mode."""
    etas = _per_mode_eta(eta, state.n_modes)
    rho = state.matrix
    for mode, eta_i in enumerate(etas):
        if eta_i == 1.0:
            continue
        ops = loss_kraus_operators(state.n_modes, state.n_max, mode, float(eta_i))
        rho = sum(op @ rho @ op.T for op in ops)
    return TruncatedState(state.n_modes, state.n_max, rho)


def splitter_isometry(weights: Sequence[float], n_max: int) -> np.ndarray:
    """Isometry taking single-mode ``|n>`` to the split state over ``len(weights)`` modes.

    ``|n> -> sum_{|m|=n} sqrt(n! / prod m_i!) prod sqrt(w_i)^{m_i} |m>``.
    """
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("weights must be a non-empty vector")
    if np.any(w < 0):
        raise ValueError("splitter weights must be non-negative")
    if abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"splitter weights must sum to 1, got {w.sum():.15g}")
    occ = occupation_matrix(w.size, n_max)
    totals = occ.sum(axis=1)
    multinomial = factorial(totals) / np.prod(factorial(occ), axis=1)
    amps = np.sqrt(multinomial) * np.prod(np.sqrt(w)[None, :] ** occ, axis=1)
    iso = np.zeros((occ.shape[0], n_max + 1))
    iso[np.arange(occ.shape[0]), totals] = amps
    return iso


def split_weighted(state: TruncatedState, weights: Sequence[float]) -> TruncatedState:
    """Distribute a single-mode state over ``len(weights)`` modes with intensity weights."""
    if state.n_modes != 1:
        raise ValueError("the splitter acts on a single-mode state")
    iso = splitter_isometry(weights, state.n_max)
    rho = iso @ state.matrix @ iso.T
    return TruncatedState(len(weights), state.n_max, rho)


def split_balanced(state: TruncatedState, n_modes: int) -> TruncatedState:
    """Balanced 1-to-N splitter: a_in^dagger -> N^(-1/2) sum_k a_k^dagger."""
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    return split_weighted(state, np.full(n_modes, 1.0 / n_modes))


def partial_trace(state: TruncatedState, keep: Sequence[int]) -> TruncatedState:
    """Reduced state on the modes in ``keep`` (returned in ascending mode order)."""
    keep = [int(k) for k in keep]
    keep_sorted = sorted(set(keep))
    if len(keep_sorted) != len(keep):
        raise ValueError("keep must not contain duplicates")
    if not keep_sorted:
        raise ValueError("keep must name at least one mode")
    if keep_sorted[0] < 0 or keep_sorted[-1] >= state.n_modes:
        raise ValueError(f"keep must be a subset of range({state.n_modes})")
    if len(keep_sorted) == state.n_modes:
        return state

    occ = state.occupations
    traced = [i for i in range(state.n_modes) if i not in keep_sorted]
    reduced_index = basis_index(len(keep_sorted), state.n_max)
    kept_idx = np.fromiter(
        (reduced_index[tuple(row)] for row in occ[:, keep_sorted]), dtype=np.int64
    )
    _, rest_label = np.unique(occ[:, traced], axis=0, return_inverse=True)
    rest_label = rest_label.ravel()
    rows, cols = np.nonzero(rest_label[:, None] == rest_label[None, :])

    dim = len(enumerate_basis(len(keep_sorted), state.n_max))
    reduced = np.zeros((dim, dim), dtype=complex)
    np.add.at(reduced, (kept_idx[rows], kept_idx[cols]), state.matrix[rows, cols])
    return TruncatedState(len(keep_sorted), state.n_max, reduced)
