"""Unit tests for the truncated Fock basis and truncated states."""

import math

import numpy as np
import pytest

from gmewitness.errors import ConsistencyError, DimensionGuardError
from gmewitness.fock import (
    TruncatedState,
    basis_index,
    basis_size,
    coherent_amplitude_table,
    coherent_overlap,
    enumerate_basis,
    occupation_matrix,
    w_state,
)
from gmewitness.settings import app_settings


class TestBasis:
    """Test enumeration and indexing of the truncated basis."""

    @pytest.mark.parametrize(
        ("n_modes", "n_max"), [(1, 0), (1, 4), (2, 2), (3, 2), (8, 2), (20, 2), (4, 3)]
    )
    def test_size_matches_binomial(self, n_modes, n_max):
        """Basis size is C(N + n_max, n_max) and the enumeration agrees."""
        assert basis_size(n_modes, n_max) == math.comb(n_modes + n_max, n_max)
        assert len(enumerate_basis(n_modes, n_max)) == basis_size(n_modes, n_max)

    def test_lexicographic_order(self):
        """Occupations come in ascending lexicographic order starting from the vacuum."""
        basis = enumerate_basis(3, 2)
        assert basis[0] == (0, 0, 0)
        assert list(basis) == sorted(basis)
        assert all(sum(occ) <= 2 for occ in basis)

    def test_index_inverts_enumeration(self):
        """basis_index maps every occupation back to its position."""
        index = basis_index(4, 2)
        for i, occ in enumerate(enumerate_basis(4, 2)):
            assert index[occ] == i

    def test_occupation_matrix_is_read_only(self):
        """The cached occupation array cannot be mutated by callers."""
        occ = occupation_matrix(3, 2)
        assert occ.shape == (10, 3)
        with pytest.raises(ValueError):
            occ[0, 0] = 5

    def test_guard(self, monkeypatch):
        """Bases above the configured size raise DimensionGuardError."""
        monkeypatch.setattr(app_settings.fock, "max_basis_size", 50)
        enumerate_basis.cache_clear()
        try:
            with pytest.raises(DimensionGuardError, match="Fock basis"):
                enumerate_basis(9, 2)
        finally:
            enumerate_basis.cache_clear()

    def test_default_guard_allows_acceptance_sizes(self):
        """N = 30 at n_max = 2 stays far below the default guard."""
        assert basis_size(30, 2) < app_settings.fock.max_basis_size

    def test_invalid_arguments(self):
        """Non-positive mode counts and negative truncations are rejected."""
        with pytest.raises(ValueError, match="n_modes"):
            basis_size(0, 2)
        with pytest.raises(ValueError, match="n_max"):
            basis_size(2, -1)


class TestCoherentAmplitudes:
    """Test coherent-state amplitudes."""

    def test_vacuum_overlap(self):
        """<0|alpha> = exp(-|alpha|^2 / 2)."""
        assert coherent_overlap(0, 0.83) == pytest.approx(math.exp(-(0.83**2) / 2))

    def test_amplitudes_normalise(self):
        """Populations sum to one for a large enough truncation."""
        amps = coherent_overlap(np.arange(60), 1.3)
        assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-14)

    def test_table_matches_scalar(self):
        """The per-mode table agrees with the scalar overlap."""
        table = coherent_amplitude_table(np.array([0.2, 0.83]), 3)
        for i, alpha in enumerate([0.2, 0.83]):
            for n in range(4):
                assert table[i, n] == pytest.approx(coherent_overlap(n, alpha))

    def test_negative_photon_number(self):
        """Negative photon numbers are rejected."""
        with pytest.raises(ValueError, match="non-negative"):
            coherent_overlap(-1, 0.5)


class TestTruncatedState:
    """Test construction and validation of density matrices."""

    def test_vacuum(self):
        """The vacuum has all population on the first basis element."""
        state = TruncatedState.vacuum(3, 2)
        assert state.populations[0] == 1.0
        assert state.photon_number_distribution().tolist() == [1.0, 0.0, 0.0]

    def test_w_state_single_photon(self):
        """|W_N> carries exactly one photon spread evenly over the modes."""
        state = w_state(4, 2)
        assert state.photon_number_distribution() == pytest.approx([0.0, 1.0, 0.0])
        index = basis_index(4, 2)
        for k in range(4):
            occ = tuple(1 if i == k else 0 for i in range(4))
            assert state.populations[index[occ]] == pytest.approx(0.25)

    def test_matrix_is_frozen(self):
        """States are immutable."""
        state = TruncatedState.vacuum(2, 1)
        with pytest.raises(ValueError):
            state.matrix[0, 0] = 0.5

    def test_rejects_wrong_shape(self):
        """The matrix must match the basis dimension."""
        with pytest.raises(ValueError, match="shape"):
            TruncatedState(2, 1, np.eye(4) / 4)

    def test_rejects_trace(self):
        """A matrix without unit trace is a consistency failure."""
        with pytest.raises(ConsistencyError, match="trace"):
            TruncatedState(2, 1, np.eye(3) / 2)

    def test_rejects_non_hermitian(self):
        """Non-Hermitian matrices are rejected."""
        rho = np.eye(3, dtype=complex) / 3
        rho[0, 1] = 0.1
        with pytest.raises(ConsistencyError, match="Hermitian"):
            TruncatedState(2, 1, rho)

    def test_rejects_negative_eigenvalue(self):
        """Indefinite matrices are not states."""
        rho = np.diag([1.2, -0.2, 0.0]).astype(complex)
        with pytest.raises(ConsistencyError, match="positive semidefinite"):
            TruncatedState(2, 1, rho)

    def test_fock_above_truncation(self):
        """Fock states must fit in the truncation."""
        with pytest.raises(ValueError, match="exceeds the truncation"):
            TruncatedState.fock((2, 1), 2)

    def test_single_mode_normalises(self):
        """single_mode renormalises the populations."""
        state = TruncatedState.single_mode([2.0, 1.0, 1.0])
        assert state.populations == pytest.approx([0.5, 0.25, 0.25])
