"""Unit tests for the subset analysis."""

from collections import defaultdict

import pytest

from gmewitness.common.models import DisplacementSpec, WitnessParams
from gmewitness.errors import DimensionGuardError
from gmewitness.expsim import (
    SourceModel,
    TuningGrid,
    enumerate_subsets,
    evaluate,
    subset_analysis,
)
from tests.utils import SQRT_LN2

PARAMS_4 = {
    2: WitnessParams(2, 0.8, 20.0),
    3: WitnessParams(3, 1.6, 60.0),
    4: WitnessParams(4, 2.73, 102.0),
}


class TestEnumeration:
    """Test subset enumeration."""

    def test_eight_parties(self):
        """N = 8 has 2^8 - 8 - 1 = 247 subsets of two or more parties."""
        assert len(enumerate_subsets(8)) == 247

    def test_order(self):
        """Subsets come by size, then lexicographically."""
        assert enumerate_subsets(3) == [(0, 1), (0, 2), (1, 2), (0, 1, 2)]

    def test_min_size(self):
        """The minimum size is configurable."""
        assert enumerate_subsets(4, min_size=4) == [(0, 1, 2, 3)]


class TestSubsetAnalysis:
    """Test the per-subset witness evaluation."""

    def test_full_set_matches_evaluation(self, experiment_model):
        """The subset holding every party is the experiment itself."""
        model = experiment_model(4)
        spec = DisplacementSpec.uniform(0.83, 4)
        rows = subset_analysis(model, spec, PARAMS_4, workers=1)
        assert len(rows) == 11
        full = rows[-1]
        assert full.modes == (0, 1, 2, 3)
        report = evaluate(model, PARAMS_4[4], spec)
        assert full.violation == pytest.approx(report.violation, abs=1e-10)
        assert full.bound == pytest.approx(report.bound.value, abs=1e-10)
        assert full.one_minus_p0 == pytest.approx(1.0 - report.triple.p0)
        assert (full.lam, full.mu) == (2.73, 102.0)

    def test_sizes_share_parameters(self, experiment_model):
        """Every subset of one size is scored with the same weights."""
        rows = subset_analysis(experiment_model(4), DisplacementSpec.uniform(0.83, 4), PARAMS_4)
        for row in rows:
            assert (row.lam, row.mu) == (PARAMS_4[row.size].lam, PARAMS_4[row.size].mu)
            assert row.log10_p is None

    def test_missing_size(self, experiment_model):
        """Supplied parameters must cover every subset size."""
        params = {k: v for k, v in PARAMS_4.items() if k != 3}
        with pytest.raises(ValueError, match="size 3"):
            subset_analysis(experiment_model(4), DisplacementSpec.uniform(0.83, 4), params)

    def test_p_values(self, experiment_model):
        """Trial counts attach a Hoeffding log10 p to every row."""
        rows = subset_analysis(
            experiment_model(4), DisplacementSpec.uniform(0.83, 4), PARAMS_4, counts=(10**6,) * 3
        )
        for row in rows:
            assert row.log10_p is not None
            assert row.log10_p <= 0.0
            if row.violation > 0:
                assert row.log10_p < 0.0

    def test_tunes_each_size(self, experiment_model):
        """Without parameters each size is tuned once."""
        grid = TuningGrid(0.5, 10.0, 4, 5.0, 200.0, 4, refine=False)
        rows = subset_analysis(
            experiment_model(3), DisplacementSpec.uniform(0.83, 3), grid=grid, workers=1
        )
        by_size = defaultdict(set)
        for row in rows:
            by_size[row.size].add((row.lam, row.mu))
        assert all(len(choices) == 1 for choices in by_size.values())

    def test_guard(self):
        """Above the pattern guard the analysis is refused."""
        with pytest.raises(DimensionGuardError, match="subset analysis"):
            subset_analysis(SourceModel(21), DisplacementSpec.uniform(0.83, 21))

    def test_spec_mismatch(self, experiment_model):
        """Model and displacement must agree on N."""
        with pytest.raises(ValueError, match="number of parties"):
            subset_analysis(experiment_model(4), DisplacementSpec.uniform(0.83, 3), PARAMS_4)


@pytest.mark.slow
def test_every_subset_of_eight_parties_violates(experiment_model):
    """The N = 8 experiment-like state violates on all 247 subsets, equally per size."""
    rows = subset_analysis(experiment_model(8), DisplacementSpec.uniform(SQRT_LN2, 8))
    assert len(rows) == 247
    assert all(row.violation > 0 for row in rows)
    by_size = defaultdict(list)
    for row in rows:
        by_size[row.size].append(row.violation)
    for values in by_size.values():
        assert max(values) - min(values) <= 1e-10

