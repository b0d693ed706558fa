"""Density matrices on a truncated multimode Fock space."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from gmewitness.errors import ConsistencyError
from gmewitness.fock.basis import (
    Occupation,
    basis_index,
    enumerate_basis,
    occupation_matrix,
)
from gmewitness.settings import app_settings


@dataclass(frozen=True, eq=False)
class TruncatedState:
    """Density matrix ``rho`` over ``enumerate_basis(n_modes, n_max)``.

    Construction checks Hermiticity, unit trace and positivity within the
    ``FOCK__*_TOL`` tolerances. Instances are immutable; channels return
    new states.
    """

    n_modes: int
    n_max: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        """Validate shape and physicality of the density matrix."""
        rho = np.array(self.matrix, dtype=complex)
        dim = len(enumerate_basis(self.n_modes, self.n_max))
        if rho.shape != (dim, dim):
            raise ValueError(
                f"density matrix must have shape ({dim}, {dim}) for "
                f"{self.n_modes} modes at n_max={self.n_max}, got {rho.shape}"
            )
        tol = app_settings.fock
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol.hermitian_tol:
            raise ConsistencyError("density matrix is not Hermitian")
        trace = np.trace(rho)
        if abs(trace - 1.0) > tol.trace_tol:
            raise ConsistencyError(f"density matrix trace {trace.real:.15g} != 1")
        # Symmetrize away the rounding that passed the check
        rho = 0.5 * (rho + rho.conj().T)
        min_eig = float(np.linalg.eigvalsh(rho)[0])
        if min_eig < -tol.psd_tol:
            raise ConsistencyError(
                f"density matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})"
            )
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension D."""
        return self.matrix.shape[0]

    @property
    def basis(self) -> tuple[Occupation, ...]:
        """Occupation tuples labelling rows and columns."""
        return enumerate_basis(self.n_modes, self.n_max)

    @property
    def occupations(self) -> np.ndarray:
        """Basis as an integer array of shape (D, N)."""
        return occupation_matrix(self.n_modes, self.n_max)

    @cached_property
    def total_photons(self) -> np.ndarray:
        """Total photon number of every basis element."""
        return self.occupations.sum(axis=1)

    @cached_property
    def populations(self) -> np.ndarray:
        """Real diagonal of the density matrix."""
        return np.clip(self.matrix.diagonal().real, 0.0, None)

    def photon_number_distribution(self) -> np.ndarray:
        """Probability of each total photon number 0..n_max."""
        return np.bincount(
            self.total_photons, weights=self.populations, minlength=self.n_max + 1
        )

    @classmethod
    def from_vector(
        cls, n_modes: int, n_max: int, vector: np.ndarray
    ) -> TruncatedState:
        """Pure state from a (normalised on the fly) amplitude vector."""
        vec = np.asarray(vector, dtype=complex).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("state vector must be non-zero")
        vec = vec / norm
        return cls(n_modes, n_max, np.outer(vec, vec.conj()))

    @classmethod
    def fock(cls, occupation: Occupation, n_max: int) -> TruncatedState:
        """Pure Fock state ``|occupation>``."""
        occupation = tuple(int(v) for v in occupation)
        if sum(occupation) > n_max:
            raise ValueError(
                f"occupation {occupation} exceeds the truncation n_max={n_max}"
            )
        n_modes = len(occupation)
        vec = np.zeros(len(enumerate_basis(n_modes, n_max)), dtype=complex)
        vec[basis_index(n_modes, n_max)[occupation]] = 1.0
        return cls.from_vector(n_modes, n_max, vec)

    @classmethod
    def vacuum(cls, n_modes: int, n_max: int) -> TruncatedState:
        """Multimode vacuum."""
        return cls.fock((0,) * n_modes, n_max)

    @classmethod
    def single_mode(cls, populations: np.ndarray | list[float]) -> TruncatedState:
        """Diagonal single-mode state with the given photon-number populations."""
        pops = np.asarray(populations, dtype=float)
        if np.any(pops < 0):
            raise ValueError("populations must be non-negative")
        return cls(1, len(pops) - 1, np.diag(pops / pops.sum()).astype(complex))


def w_state(n_modes: int, n_max: int = 1) -> TruncatedState:
    """Ideal single-photon W state: a photon in equal superposition over all modes."""
    if n_max < 1:
        raise ValueError("a W state needs n_max >= 1")
    index = basis_index(n_modes, n_max)
    vec = np.zeros(len(index), dtype=complex)
    for k in range(n_modes):
        occ = tuple(1 if i == k else 0 for i in range(n_modes))
        vec[index[occ]] = 1.0
    return TruncatedState.from_vector(n_modes, n_max, vec)
