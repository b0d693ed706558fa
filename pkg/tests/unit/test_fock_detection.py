"""Unit tests for displaced on/off detection."""

import math

import numpy as np
import pytest

from gmewitness.errors import DimensionGuardError
from gmewitness.fock import (
    NO_AVERAGING,
    PhaseAveraging,
    TruncatedState,
    add_dark_clicks,
    click_number_distribution,
    click_stats,
    noclick_set_prob,
    noclick_table,
    pair_noclick_table,
    vacuum_pair_table,
    w_state,
    with_dark_counts,
)
from gmewitness.settings import app_settings
from tests.utils import random_state


class TestPhaseAveraging:
    """Test the common-phase quadrature."""

    def test_default_points(self):
        """The default quadrature uses 2 n_max + 1 phases."""
        assert PhaseAveraging().n_points(2) == 5

    def test_too_few_points(self):
        """Fewer than 2 n_max + 1 phases cannot reproduce the continuous average."""
        with pytest.raises(ValueError, match="at least 5 points"):
            PhaseAveraging(points=3).n_points(2)

    def test_sector_weight(self):
        """Only total-photon differences divisible by K survive."""
        weights = PhaseAveraging().sector_weight(np.array([0, 1, 2, -2, 5]), 2)
        assert weights.tolist() == [1.0, 0.0, 0.0, 0.0, 1.0]

    def test_disabled(self):
        """Without averaging every coherence survives."""
        assert NO_AVERAGING.sector_weight(np.array([1, 2]), 2).tolist() == [1.0, 1.0]


class TestNoClickProbabilities:
    """Test subset no-click probabilities."""

    def test_vacuum_with_displacement(self):
        """The displaced vacuum stays silent with exp(-|S| alpha^2)."""
        state = TruncatedState.vacuum(3, 2)
        prob = noclick_set_prob(state, [0, 2], [0.7, 0.7, 0.7])
        assert prob == pytest.approx(math.exp(-2 * 0.49))

    def test_single_photon_without_displacement(self):
        """An occupied mode always clicks without displacement."""
        state = TruncatedState.fock((1, 0), 1)
        assert noclick_set_prob(state, [0]) == pytest.approx(0.0)
        assert noclick_set_prob(state, [1]) == pytest.approx(1.0)

    def test_dark_counts_scale_silence(self):
        """Independent dark counts multiply silence by (1 - p_dc) per detector."""
        state = TruncatedState.vacuum(2, 1)
        assert noclick_set_prob(state, [0, 1], p_dc=0.1) == pytest.approx(0.81)

    def test_silence_never_grows_with_dark_counts(self, rng):
        """The zero-click probability is non-increasing in p_dc, from 0 up to 1."""
        grid = np.linspace(0.0, 1.0, 11)
        for _ in range(10):
            state = random_state(3, 2, rng)
            alphas = rng.uniform(0.1, 1.2, size=3)
            silent = [click_stats(state, alphas, p_dc=p).p0 for p in grid]
            assert np.all(np.diff(silent) <= 1e-14)
            assert silent[-1] == 0.0
            undisplaced = [click_number_distribution(state, p)[0] for p in grid]
            assert np.all(np.diff(undisplaced) <= 1e-14)

    def test_table_matches_direct_route(self, rng):
        """The subset-sum table agrees with the dense per-subset operator."""
        for _ in range(10):
            state = random_state(3, 2, rng)
            alphas = rng.uniform(0.1, 1.2, size=3)
            table = noclick_table(state, alphas)
            for mask in range(8):
                subset = [i for i in range(3) if mask >> i & 1]
                assert table[mask] == pytest.approx(
                    noclick_set_prob(state, subset, alphas), abs=1e-12
                )

    def test_doubling_phase_points_changes_nothing(self, rng):
        """The 2 n_max + 1 point average is already exact."""
        for _ in range(20):
            state = random_state(3, 2, rng)
            alphas = rng.uniform(0.1, 1.2, size=3) * np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=3))
            k = PhaseAveraging().n_points(state.n_max)
            base = noclick_table(state, alphas, PhaseAveraging(points=k))
            doubled = noclick_table(state, alphas, PhaseAveraging(points=2 * k))
            assert np.allclose(base, doubled, rtol=0.0, atol=1e-12)

    def test_large_displacement(self, rng):
        """Amplitudes whose vacuum overlap underflows give silent probability zero."""
        table = noclick_table(TruncatedState.vacuum(2, 2), [40.0, 0.5])
        assert table == pytest.approx([1.0, 0.0, math.exp(-0.25), 0.0], abs=1e-15)
        state = random_state(2, 2, rng)
        alphas = [30.0, 0.7]
        table = noclick_table(state, alphas)
        assert table[1] == pytest.approx(0.0, abs=1e-15)
        assert table[2] == pytest.approx(noclick_set_prob(state, [1], alphas), abs=1e-12)

    def test_table_without_averaging(self, rng):
        """Both routes also agree with averaging switched off."""
        state = random_state(2, 2, rng)
        alphas = [0.4, 0.9]
        table = noclick_table(state, alphas, NO_AVERAGING)
        assert table[3] == pytest.approx(
            noclick_set_prob(state, [0, 1], alphas, NO_AVERAGING), abs=1e-12
        )

    def test_pattern_guard(self, monkeypatch):
        """Click-pattern tables above the guard are refused."""
        monkeypatch.setattr(app_settings.fock, "max_pattern_modes", 3)
        with pytest.raises(DimensionGuardError, match="click-pattern"):
            noclick_table(TruncatedState.vacuum(4, 1))


class TestClickStats:
    """Test click patterns and click-number distributions."""

    def test_patterns_sum_to_one(self, rng):
        """Exact click patterns form a probability distribution."""
        stats = click_stats(random_state(3, 2, rng), [0.5, 0.6, 0.7])
        assert stats.patterns.sum() == pytest.approx(1.0)
        assert stats.per_n_click.sum() == pytest.approx(1.0)

    def test_w_state_clicks_once(self):
        """Without displacement |W_N> gives exactly one click."""
        stats = click_stats(w_state(4, 2), None, NO_AVERAGING)
        assert stats.per_n_click == pytest.approx([0, 1, 0, 0, 0])
        assert stats.pattern_prob([2]) == pytest.approx(0.25)
        assert stats.multi_click == pytest.approx(0.0)

    def test_pair_table_holds_singles_on_diagonal(self, rng):
        """pair_vacuum[i, i] is the single-detector no-click probability."""
        state = random_state(3, 2, rng)
        stats = click_stats(state, [0.3, 0.3, 0.3])
        assert stats.pair_vacuum[1, 1] == pytest.approx(stats.noclick_set_prob([1]))
        assert stats.pair_vacuum[0, 2] == pytest.approx(stats.noclick_set_prob([0, 2]))

    def test_later_dark_counts_compose(self, rng):
        """Adding dark counts afterwards equals including them from the start."""
        state = random_state(3, 2, rng)
        alphas = [0.4, 0.5, 0.6]
        direct = click_stats(state, alphas, p_dc=0.02)
        later = with_dark_counts(click_stats(state, alphas), 0.02)
        assert np.allclose(direct.patterns, later.patterns, atol=1e-14)
        assert later.p_dc == pytest.approx(0.02)

    def test_click_number_distribution_matches_patterns(self, rng):
        """The any-N undisplaced distribution matches the pattern route."""
        state = random_state(3, 2, rng)
        for p_dc in (0.0, 0.05):
            via_patterns = click_stats(state, None, NO_AVERAGING, p_dc).per_n_click
            assert np.allclose(click_number_distribution(state, p_dc), via_patterns, atol=1e-12)

    def test_vacuum_pair_table_matches_pair_route(self, rng):
        """Undisplaced pair silences agree with the general pair table."""
        state = random_state(3, 2, rng)
        assert np.allclose(
            vacuum_pair_table(state, 0.01),
            pair_noclick_table(state, None, NO_AVERAGING, 0.01),
            atol=1e-12,
        )

    def test_add_dark_clicks_binomial(self):
        """Dark clicks on empty detectors follow a binomial law."""
        dist = add_dark_clicks(np.array([1.0, 0.0, 0.0]), 0.1)
        assert dist == pytest.approx([0.81, 0.18, 0.01])

    def test_certain_dark_counts(self):
        """With p_dc = 1 the undisplaced vacuum fires every detector."""
        state = TruncatedState.vacuum(3, 2)
        stats = click_stats(state, None, None, 1.0)
        assert stats.per_n_click == pytest.approx([0.0, 0.0, 0.0, 1.0])
        assert stats.pattern_prob([0, 1, 2]) == pytest.approx(1.0)
        assert stats.noclick[1:] == pytest.approx(np.zeros(7))
        assert click_number_distribution(state, 1.0) == pytest.approx([0.0, 0.0, 0.0, 1.0])
        assert noclick_set_prob(state, [1], p_dc=1.0) == 0.0
        assert with_dark_counts(click_stats(state), 1.0).p0 == 0.0

    @pytest.mark.parametrize("p_dc", [-0.1, 1.5])
    def test_dark_count_probability_range(self, p_dc):
        """Dark-count probabilities must lie in [0, 1]."""
        with pytest.raises(ValueError, match="dark-count"):
            add_dark_clicks(np.array([1.0, 0.0]), p_dc)
        with pytest.raises(ValueError, match="dark-count"):
            click_stats(TruncatedState.vacuum(2, 1), None, None, p_dc)
