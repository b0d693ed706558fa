"""Shared fixtures for the witness pipeline test suite."""

import numpy as np
import pytest

from gmewitness.common.models import DisplacementSpec
from gmewitness.expsim import SourceModel
from gmewitness.utils.logging import remove_file_sinks
from tests.utils import SQRT_LN2


@pytest.fixture
def rng() -> np.random.Generator:
    """Deterministic generator for randomized property tests."""
    return np.random.default_rng(20240611)


@pytest.fixture
def sqrt_ln2_spec():
    """Factory of degenerate equal-amplitude specs at alpha = sqrt(ln 2), where f = 0."""

    def make(n_parties: int) -> DisplacementSpec:
        return DisplacementSpec.uniform(SQRT_LN2, n_parties)

    return make


@pytest.fixture
def experiment_model():
    """Factory of the balanced experiment-like model (p = 5e-3, eta = 0.3)."""

    def make(n_parties: int, p_dc: float = 0.0) -> SourceModel:
        return SourceModel.experiment_like(n_parties, p=5e-3, eta=0.3, p_dc=p_dc)

    return make


@pytest.fixture(autouse=True)
def _no_leftover_file_sinks():
    """Drop log file sinks a CLI test may have added."""
    yield
    remove_file_sinks()
