"""Bipartitions of the parties.

A bipartition is stored by the group ``G1`` that does not contain mode 0,
which makes every unordered split appear exactly once; ``G2`` is the
complement. The bound optimisation maximises over both orientations
anyway, so nothing is lost by fixing mode 0 in ``G2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from gmewitness.errors import DimensionGuardError
from gmewitness.settings import app_settings


@dataclass(frozen=True)
class Bipartition:
    """Split of ``range(n_parties)`` into G1 (without mode 0) and its complement G2."""

    n_parties: int
    g1: tuple[int, ...]

    def __post_init__(self) -> None:
        """Validate that G1 is a proper, canonical subset."""
        if self.n_parties < 2:
            raise ValueError("a bipartition needs at least two parties")
        g1 = tuple(sorted(set(self.g1)))
        if len(g1) != len(self.g1):
            raise ValueError("G1 must not contain duplicates")
        object.__setattr__(self, "g1", g1)
        if not 1 <= len(g1) <= self.n_parties - 1:
            raise ValueError("G1 must be a non-empty proper subset")
        if g1[0] < 1 or g1[-1] >= self.n_parties:
            raise ValueError(
                f"G1 must be drawn from 1..{self.n_parties - 1} (mode 0 always lies in G2)"
            )

    @cached_property
    def g2(self) -> tuple[int, ...]:
        """Complement of G1; always contains mode 0."""
        return tuple(i for i in range(self.n_parties) if i not in self.g1)

    @property
    def sizes(self) -> tuple[int, int]:
        """``(|G2|, |G1|)``."""
        return len(self.g2), len(self.g1)

    @cached_property
    def order(self) -> np.ndarray:
        """Mode order with the G2 block first, then G1."""
        return np.asarray(self.g2 + self.g1, dtype=np.int64)

    def label(self) -> str:
        """Compact text form such as ``"0,1|2,3"`` (G2 | G1)."""
        return ",".join(map(str, self.g2)) + "|" + ",".join(map(str, self.g1))


def partition_count(n_parties: int, symmetric: bool) -> int:
    """Number of bipartitions enumerated in the given mode."""
    if symmetric:
        return n_parties // 2
    return 2 ** (n_parties - 1) - 1


def enumerate_bipartitions(n_parties: int, symmetric: bool) -> list[Bipartition]:
    """All bipartitions, ordered by |G1| then lexicographically.

    In symmetric mode, one representative per size ``|G1| = 1..floor(N/2)``
    is returned; this is exhaustive when all amplitudes are equal.

    Raises:
        DimensionGuardError: For asymmetric enumeration above
            ``BISEP__MAX_ASYMMETRIC_PARTIES``.
    """
    if n_parties < 2:
        raise ValueError("n_parties must be at least 2")
    if symmetric:
        return [
            Bipartition(n_parties, tuple(range(1, size + 1)))
            for size in range(1, n_parties // 2 + 1)
        ]
    limit = app_settings.bisep.max_asymmetric_parties
    if n_parties > limit:
        raise DimensionGuardError(
            "asymmetric bipartition enumeration", partition_count(n_parties, False), 2 ** (limit - 1) - 1
        )
    return [
        Bipartition(n_parties, g1)
        for size in range(1, n_parties)
        for g1 in combinations(range(1, n_parties), size)
    ]
