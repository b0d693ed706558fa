"""Unit tests for bipartition enumeration."""

import pytest

from gmewitness.bisep import Bipartition, enumerate_bipartitions, partition_count
from gmewitness.errors import DimensionGuardError
from gmewitness.settings import app_settings


class TestBipartition:
    """Test the canonical bipartition form."""

    def test_complement_holds_mode_zero(self):
        """G2 is the complement of G1 and always contains mode 0."""
        part = Bipartition(5, (3, 1))
        assert part.g1 == (1, 3)
        assert part.g2 == (0, 2, 4)
        assert part.sizes == (3, 2)
        assert part.order.tolist() == [0, 2, 4, 1, 3]
        assert part.label() == "0,2,4|1,3"

    @pytest.mark.parametrize(
        ("g1", "message"),
        [
            ((), "non-empty proper subset"),
            ((1, 2, 3, 4), "non-empty proper subset"),
            ((0, 1), "mode 0"),
            ((1, 1), "duplicates"),
            ((4,), "mode 0"),
        ],
    )
    def test_invalid(self, g1, message):
        """Non-canonical or improper splits are rejected."""
        with pytest.raises(ValueError, match=message):
            Bipartition(4, g1)


class TestEnumeration:
    """Test enumeration in symmetric and full modes."""

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
    def test_full_count(self, n):
        """All 2^(N-1) - 1 splits appear exactly once."""
        parts = enumerate_bipartitions(n, symmetric=False)
        assert len(parts) == partition_count(n, False) == 2 ** (n - 1) - 1
        assert len({p.g1 for p in parts}) == len(parts)

    def test_full_order(self):
        """Splits are ordered by |G1|, then lexicographically."""
        parts = enumerate_bipartitions(4, symmetric=False)
        assert [p.g1 for p in parts] == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]

    @pytest.mark.parametrize("n", [2, 3, 4, 7, 30])
    def test_symmetric_one_per_size(self, n):
        """Symmetric mode gives one representative per |G1| = 1..floor(N/2)."""
        parts = enumerate_bipartitions(n, symmetric=True)
        assert [len(p.g1) for p in parts] == list(range(1, n // 2 + 1))
        assert len(parts) == partition_count(n, True)

    def test_guard(self, monkeypatch):
        """Full enumeration above the configured party count is refused."""
        monkeypatch.setattr(app_settings.bisep, "max_asymmetric_parties", 6)
        with pytest.raises(DimensionGuardError, match="asymmetric"):
            enumerate_bipartitions(7, symmetric=False)
        assert len(enumerate_bipartitions(7, symmetric=True)) == 3

    def test_rejects_single_party(self):
        """There is no bipartition of one party."""
        with pytest.raises(ValueError, match="at least 2"):
            enumerate_bipartitions(1, symmetric=True)
