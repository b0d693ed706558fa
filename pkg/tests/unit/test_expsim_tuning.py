"""Unit tests for lambda / mu tuning."""

import numpy as np
import pytest

from gmewitness.bisep import worst_case_bound
from gmewitness.common.models import DisplacementSpec, WitnessParams
from gmewitness.expsim import (
    SourceModel,
    TuningGrid,
    bound_surface,
    evaluate,
    measure,
    tune_params,
    tune_statistics,
    violation_surface,
)

SPEC_4 = DisplacementSpec.uniform(0.83, 4)
# Endpoints of geomspace are exact, so the published (2.73, 102) is a grid cell
PUBLISHED_GRID = TuningGrid(2.73, 27.3, 5, 102.0, 1020.0, 5, refine=False)


class TestTuningGrid:
    """Test grid validation and axes."""

    @pytest.mark.parametrize(
        ("kwargs", "message"),
        [
            ({"lambda_points": 0}, "must not be empty"),
            ({"lambda_min": 0.0}, "lambda range"),
            ({"lambda_min": 5.0, "lambda_max": 1.0}, "lambda range"),
            ({"mu_min": -1.0}, "mu range"),
        ],
    )
    def test_invalid(self, kwargs, message):
        """Empty or inverted grids are rejected."""
        base = {
            "lambda_min": 1.0,
            "lambda_max": 10.0,
            "lambda_points": 3,
            "mu_min": 1.0,
            "mu_max": 100.0,
            "mu_points": 3,
        }
        with pytest.raises(ValueError, match=message):
            TuningGrid(**{**base, **kwargs})

    def test_log_spaced_axes(self):
        """Axes are geometric and include both ends."""
        grid = TuningGrid(1.0, 100.0, 3, 2.0, 2.0, 1)
        assert grid.lambdas.tolist() == pytest.approx([1.0, 10.0, 100.0])
        assert grid.mus.tolist() == [2.0]

    def test_from_settings_override(self):
        """The point override applies to both axes."""
        grid = TuningGrid.from_settings(points=4)
        assert grid.lambdas.shape == grid.mus.shape == (4,)


class TestSurfaces:
    """Test the bound and violation surfaces."""

    def test_uniform_surface_matches_dense_bound(self):
        """The closed-form surface equals the dense worst-case bound cell by cell."""
        lambdas = np.array([1.0, 2.73, 6.0])
        mus = np.array([20.0, 102.0])
        surface = bound_surface(4, SPEC_4, lambdas, mus)
        for i, lam in enumerate(lambdas):
            for j, mu in enumerate(mus):
                dense = worst_case_bound(WitnessParams(4, lam, mu), SPEC_4).value
                assert surface[i, j] == pytest.approx(dense, abs=1e-9)

    def test_uniform_box_surface(self):
        """A displacement box is scored with its worst point."""
        spec = DisplacementSpec.uniform(0.83, 3, (0.8, 0.86))
        surface = bound_surface(3, spec, np.array([2.0]), np.array([40.0]))
        dense = worst_case_bound(WitnessParams(3, 2.0, 40.0), spec, workers=1).value
        assert surface[0, 0] == pytest.approx(dense, abs=1e-9)

    def test_non_uniform_surface(self):
        """Unequal amplitudes are scored with the dense bound."""
        spec = DisplacementSpec.degenerate([0.8, 0.8, 0.7])
        surface = bound_surface(3, spec, np.array([1.0, 3.0]), np.array([30.0]), workers=1)
        for i, lam in enumerate((1.0, 3.0)):
            dense = worst_case_bound(WitnessParams(3, lam, 30.0), spec, workers=1).value
            assert surface[i, 0] == pytest.approx(dense, abs=1e-9)

    def test_violation_surface_matches_evaluation(self, experiment_model):
        """One grid cell reproduces the full evaluation."""
        model = experiment_model(4)
        stats = measure(model, SPEC_4)
        surface = violation_surface(stats, SPEC_4, np.array([2.73]), np.array([102.0]))
        report = evaluate(model, WitnessParams(4, 2.73, 102.0), SPEC_4)
        assert surface[0, 0] == pytest.approx(report.violation, abs=1e-10)


class TestTuning:
    """Test the grid search and its refinement."""

    def test_grid_dominates_fixed_params(self, experiment_model):
        """Tuning never does worse than a parameter pair on the grid."""
        model = experiment_model(4)
        fixed = evaluate(model, WitnessParams(4, 2.73, 102.0), SPEC_4).violation
        tuned = tune_params(model, SPEC_4, PUBLISHED_GRID)
        assert tuned.violation >= fixed - 1e-12
        assert tuned.grid_violation.shape == (5, 5)
        assert tuned.violation == pytest.approx(float(tuned.grid_violation.max()))
        assert not tuned.refined

    def test_refinement_never_loses(self, experiment_model):
        """Nelder-Mead only replaces the grid optimum when it improves on it."""
        stats = measure(experiment_model(4), SPEC_4)
        grid = TuningGrid(1.0, 30.0, 6, 10.0, 1000.0, 6, refine=True)
        result = tune_statistics(stats, SPEC_4, grid)
        assert result.violation >= float(result.grid_violation.max()) - 1e-12
        assert grid.lambda_min * (1 - 1e-12) <= result.lam <= grid.lambda_max * (1 + 1e-12)
        assert grid.mu_min * (1 - 1e-12) <= result.mu <= grid.mu_max * (1 + 1e-12)
        assert result.params == WitnessParams(4, result.lam, result.mu)

    def test_vacuum_cannot_be_tuned_into_violation(self):
        """No lambda or mu lets the vacuum beat the biseparable bound."""
        grid = TuningGrid(0.1, 100.0, 8, 1.0, 1000.0, 8, refine=True)
        result = tune_params(SourceModel(4, eta=0.0), SPEC_4, grid)
        assert result.violation <= 1e-9
        assert np.all(result.grid_violation <= 1e-9)

    def test_ties_prefer_small_parameters(self):
        """Equal grid cells resolve to the smallest lambda, then mu."""
        stats = measure(SourceModel(3, eta=0.0), DisplacementSpec.uniform(0.0, 3))
        grid = TuningGrid(1.0, 10.0, 3, 5.0, 50.0, 3, refine=False)
        result = tune_statistics(stats, DisplacementSpec.uniform(0.0, 3), grid)
        best = float(result.grid_violation.max())
        rows, cols = np.nonzero(result.grid_violation == best)
        assert (result.lam, result.mu) == (grid.lambdas[rows[0]], grid.mus[cols[0]])
