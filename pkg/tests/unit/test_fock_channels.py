"""Unit and property tests for loss, splitters and partial traces."""

import numpy as np
import pytest

from gmewitness.fock import (
    NO_AVERAGING,
    TruncatedState,
    apply_loss,
    basis_index,
    fold_detector_efficiency,
    noclick_set_prob,
    partial_trace,
    split_balanced,
    split_weighted,
    splitter_isometry,
    w_state,
)
from tests.utils import (
    inefficient_noclick_matrix,
    loss_by_dilation,
    random_density_matrix,
    random_state,
)

PROPERTY_CASES = 500


def _random_single_mode(rng, n_max):
    return TruncatedState(1, n_max, random_density_matrix(n_max + 1, rng))


class TestLoss:
    """Test the pure-loss channel."""

    def test_single_photon_populations(self):
        """|1> becomes eta |1><1| + (1 - eta) |0><0|."""
        state = apply_loss(TruncatedState.fock((1,), 2), 0.3)
        assert state.populations == pytest.approx([0.7, 0.3, 0.0])

    def test_two_photons_binomial(self):
        """|2> loses photons binomially."""
        eta = 0.4
        state = apply_loss(TruncatedState.fock((2,), 2), eta)
        expected = [(1 - eta) ** 2, 2 * eta * (1 - eta), eta**2]
        assert state.populations == pytest.approx(expected)

    def test_full_loss_gives_vacuum(self, rng):
        """eta = 0 maps every state to the vacuum."""
        state = apply_loss(random_state(2, 2, rng), 0.0)
        assert state.populations[0] == pytest.approx(1.0)

    def test_unit_transmission_is_identity(self, rng):
        """eta = 1 leaves the state untouched."""
        state = random_state(2, 2, rng)
        assert np.allclose(apply_loss(state, 1.0).matrix, state.matrix)

    def test_rejects_out_of_range(self):
        """Efficiencies outside [0, 1] are rejected."""
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            apply_loss(TruncatedState.vacuum(1, 1), 1.5)

    def test_matches_beam_splitter_dilation(self, rng):
        """Kraus loss equals a beam splitter with a vacuum environment."""
        for _ in range(50):
            n_max = int(rng.integers(1, 4))
            eta = float(rng.uniform())
            state = _random_single_mode(rng, n_max)
            assert np.max(
                np.abs(apply_loss(state, eta).matrix - loss_by_dilation(state, eta).matrix)
            ) < 1e-12


class TestSplitter:
    """Test the weighted splitter."""

    def test_isometry_columns_are_orthonormal(self):
        """The splitter is an isometry from the single mode."""
        iso = splitter_isometry([0.2, 0.3, 0.5], 3)
        assert np.allclose(iso.T @ iso, np.eye(4), atol=1e-14)

    def test_balanced_split_of_single_photon_is_w_state(self):
        """A single photon on a balanced 1-to-N splitter gives |W_N>."""
        split = split_balanced(TruncatedState.fock((1,), 2), 4)
        assert np.allclose(split.matrix, w_state(4, 2).matrix, atol=1e-14)

    def test_weights_must_sum_to_one(self):
        """Intensity weights must be normalised."""
        with pytest.raises(ValueError, match="sum to 1"):
            split_weighted(TruncatedState.vacuum(1, 1), [0.5, 0.6])

    def test_rejects_multimode_input(self):
        """Only single-mode states can be split."""
        with pytest.raises(ValueError, match="single-mode"):
            split_balanced(TruncatedState.vacuum(2, 1), 2)


class TestPartialTrace:
    """Test reduced states."""

    def test_w_state_marginal(self):
        """One mode of |W_N> holds a photon with probability 1/N."""
        reduced = partial_trace(w_state(5, 2), [2])
        assert reduced.populations == pytest.approx([0.8, 0.2, 0.0])

    def test_pair_marginal_of_w_state(self):
        """Two modes of |W_N> hold (2/N) |W_2> + (1 - 2/N) |0>."""
        reduced = partial_trace(w_state(4, 2), [0, 3])
        index = basis_index(2, 2)
        assert reduced.matrix[index[(0, 0)], index[(0, 0)]].real == pytest.approx(0.5)
        assert reduced.matrix[index[(1, 0)], index[(0, 1)]].real == pytest.approx(0.25)

    def test_trace_is_preserved(self, rng):
        """Partial traces of random states are states."""
        state = random_state(3, 2, rng)
        reduced = partial_trace(state, [1])
        assert np.trace(reduced.matrix).real == pytest.approx(1.0)

    def test_rejects_duplicates(self):
        """Modes to keep must be distinct."""
        with pytest.raises(ValueError, match="duplicates"):
            partial_trace(w_state(3, 1), [1, 1])

    def test_rejects_out_of_range(self):
        """Modes to keep must exist."""
        with pytest.raises(ValueError, match="subset"):
            partial_trace(w_state(3, 1), [0, 3])


class TestChannelIdentities:
    """Randomised identities between channels."""

    def test_loss_commutes_with_balanced_splitter(self, rng):
        """Uniform loss before or after a balanced splitter gives the same state."""
        for _ in range(PROPERTY_CASES):
            n_max = int(rng.integers(1, 4))
            n_modes = int(rng.integers(2, 4))
            eta = float(rng.uniform())
            single = _random_single_mode(rng, n_max)
            before = split_balanced(apply_loss(single, eta), n_modes)
            after = apply_loss(split_balanced(single, n_modes), eta)
            assert np.max(np.abs(before.matrix - after.matrix)) < 1e-12

    def test_detector_efficiency_folds_into_state(self, rng):
        """A lossy displaced detector equals loss on the state and a rescaled displacement."""
        for _ in range(PROPERTY_CASES):
            n_max = int(rng.integers(1, 4))
            eta = float(rng.uniform())
            alpha = float(rng.uniform(0.0, 1.5))
            state = _random_single_mode(rng, n_max)
            povm = inefficient_noclick_matrix(alpha, eta, n_max)
            direct = float(np.real(np.trace(state.matrix @ povm)))
            folded_alpha = -fold_detector_efficiency(alpha, eta)
            folded = noclick_set_prob(
                apply_loss(state, eta), [0], [folded_alpha], NO_AVERAGING
            )
            assert abs(direct - folded) < 1e-12

    def test_fold_rejects_bad_efficiency(self):
        """Efficiencies outside [0, 1] are rejected."""
        with pytest.raises(ValueError, match="efficiency"):
            fold_detector_efficiency(0.5, -0.1)
