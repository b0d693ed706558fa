"""Truncated multimode Fock basis and coherent-state amplitudes.

The basis of an N-mode space truncated at total photon number ``n_max``
is the list of occupation tuples with sum at most ``n_max``, in
lexicographic ascending order. Every module indexes density matrices
with this order.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import comb, factorial

from gmewitness.errors import DimensionGuardError
from gmewitness.settings import app_settings

Occupation = tuple[int, ...]


def basis_size(n_modes: int, n_max: int) -> int:
    """Number of occupation tuples with total at most ``n_max``: C(N + n_max, n_max)."""
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    return int(comb(n_modes + n_max, n_max, exact=True))


def _occupations(n_modes: int, budget: int):
    if n_modes == 1:
        for v in range(budget + 1):
            yield (v,)
        return
    for v in range(budget + 1):
        for rest in _occupations(n_modes - 1, budget - v):
            yield (v,) + rest


@lru_cache(maxsize=128)
def enumerate_basis(n_modes: int, n_max: int) -> tuple[Occupation, ...]:
    """Occupation tuples with total at most ``n_max``, lexicographic ascending.

    Raises:
        DimensionGuardError: When the basis exceeds ``FOCK__MAX_BASIS_SIZE``.
    """
    size = basis_size(n_modes, n_max)
    limit = app_settings.fock.max_basis_size
    if size > limit:
        raise DimensionGuardError("Fock basis", size, limit)
    return tuple(_occupations(n_modes, n_max))


@lru_cache(maxsize=128)
def basis_index(n_modes: int, n_max: int) -> dict[Occupation, int]:
    """Map from occupation tuple to its position in :func:`enumerate_basis`."""
    return {occ: i for i, occ in enumerate(enumerate_basis(n_modes, n_max))}


@lru_cache(maxsize=128)
def occupation_matrix(n_modes: int, n_max: int) -> np.ndarray:
    """Basis as a read-only integer array of shape (D, N)."""
    occ = np.asarray(enumerate_basis(n_modes, n_max), dtype=np.int64).reshape(
        -1, n_modes
    )
    occ.setflags(write=False)
    return occ


def coherent_overlap(n: int | np.ndarray, alpha: complex) -> complex | np.ndarray:
    """Fock amplitude of a coherent state: exp(-|alpha|^2 / 2) alpha^n / sqrt(n!)."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("photon number must be non-negative")
    alpha = complex(alpha)
    amp = (
        np.exp(-abs(alpha) ** 2 / 2.0)
        * np.power(alpha, n_arr)
        / np.sqrt(factorial(n_arr, exact=False))
    )
    if n_arr.ndim == 0:
        return complex(amp)
    return amp


def coherent_amplitude_table(alphas: np.ndarray, n_max: int) -> np.ndarray:
    """Table ``c[i, n] = <n|alpha_i>`` for every mode and n <= n_max."""
    alphas = np.asarray(alphas, dtype=complex)
    n = np.arange(n_max + 1)
    return np.exp(-np.abs(alphas[:, None]) ** 2 / 2.0) * np.power(
        alphas[:, None], n[None, :]
    ) / np.sqrt(factorial(n, exact=False))[None, :]
