"""Test utilities: random states and independent reference computations."""

import math

import numpy as np
from scipy.linalg import expm, ldl

from gmewitness.fock import TruncatedState, basis_index, enumerate_basis, partial_trace

SQRT_LN2 = math.sqrt(math.log(2.0))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random complex density matrix of the given dimension."""
    rank = dim if rank is None else rank
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = a @ a.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_state(n_modes: int, n_max: int, rng: np.random.Generator) -> TruncatedState:
    """Random mixed state on the truncated N-mode space."""
    dim = len(enumerate_basis(n_modes, n_max))
    return TruncatedState(n_modes, n_max, random_density_matrix(dim, rng))


def random_real_low_photon_state(n_modes: int, rng: np.random.Generator) -> TruncatedState:
    """Random real mixed state supported on photon number <= 1 (n_max = 1)."""
    dim = n_modes + 1
    a = rng.standard_normal((dim, dim))
    rho = a @ a.T
    return TruncatedState(n_modes, 1, rho / np.trace(rho))


def annihilation(cutoff: int) -> np.ndarray:
    """Single-mode annihilation operator on ``|0>, ..., |cutoff>``."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), k=1)


def displacement_matrix(alpha: float, cutoff: int = 40) -> np.ndarray:
    """``D(alpha) = exp(alpha a^dagger - alpha a)`` on a large single-mode cutoff."""
    a = annihilation(cutoff)
    return expm(alpha * (a.T - a))


def inefficient_noclick_matrix(alpha: float, eta: float, n_max: int, cutoff: int = 40) -> np.ndarray:
    """No-click POVM element ``D(alpha)^dagger (1 - eta)^n D(alpha)`` restricted to n <= n_max."""
    d = displacement_matrix(alpha, cutoff)
    inner = np.diag((1.0 - eta) ** np.arange(cutoff + 1))
    full = d.T @ inner @ d
    return full[: n_max + 1, : n_max + 1]


def loss_by_dilation(state: TruncatedState, eta: float) -> TruncatedState:
    """Pure loss on a single-mode state as a beam splitter with a vacuum environment.

    The splitter conserves the total photon number, so the two-mode
    truncation at the same ``n_max`` is exact.
    """
    if state.n_modes != 1:
        raise ValueError("dilation helper is single-mode only")
    n_max = state.n_max
    index = basis_index(2, n_max)
    dim = len(index)
    a = np.zeros((dim, dim))
    b = np.zeros((dim, dim))
    for (n, m), col in index.items():
        if n > 0:
            a[index[(n - 1, m)], col] = np.sqrt(n)
        if m > 0:
            b[index[(n, m - 1)], col] = np.sqrt(m)
    theta = np.arccos(np.sqrt(eta))
    unitary = expm(theta * (a.T @ b - a @ b.T))
    embed = np.zeros((dim, n_max + 1))
    for n in range(n_max + 1):
        embed[index[(n, 0)], n] = 1.0
    joint = unitary @ embed @ state.matrix @ embed.T @ unitary.T
    return partial_trace(TruncatedState(2, n_max, joint), [0])


def ldl_top_eigenvalue(matrix: np.ndarray, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Largest eigenvalue of a symmetric matrix by bisection on LDL^T inertia."""
    n = matrix.shape[0]

    def count_above(x: float) -> int:
        _, d, _ = ldl(matrix - x * np.eye(n))
        return int(np.sum(np.linalg.eigvalsh(d) > 0))

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if count_above(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
