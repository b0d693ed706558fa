"""Monte Carlo trials of the three measurement settings.

Each setting has its own exact click-pattern distribution:

* ``o``: displaced detectors on all parties, scored ``sum_{i != j} sigma_i sigma_j``
* ``z``: undisplaced detectors, scored with the Z weights
* ``s``: mode 0 split on a balanced two-port, scored on the coincidence

Trials of one setting are drawn as multinomial counts over patterns in
fixed-size blocks. Block ``b`` of setting ``k`` uses a Philox generator
seeded with ``SeedSequence(seed, spawn_key=(k, b))``, so the merged
counts do not depend on how blocks are spread over workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gmewitness.common.models import (
    DisplacementSpec,
    TrialCounts,
    WitnessParams,
    sigma_multiplier,
)
from gmewitness.expsim.evaluate import Conventions
from gmewitness.expsim.source import SourceModel, make_state
from gmewitness.fock import (
    NO_AVERAGING,
    TruncatedState,
    click_stats,
    partial_trace,
    split_balanced,
)
from gmewitness.settings import app_settings
from gmewitness.utils.logging import get_logger
from gmewitness.utils.parallel import parallel_map
from gmewitness.witness import f_coeffs

logger = get_logger("gmewitness.expsim.trials")

_SETTINGS = ("o", "z", "s")


@dataclass(frozen=True, eq=False)
class PatternDistribution:
    """Outcome probabilities of one measurement setting and the score of each outcome."""

    name: str
    probabilities: np.ndarray
    scores: np.ndarray

    @property
    def mean(self) -> float:
        """Exact expected score."""
        return float(self.probabilities @ self.scores)


def _silent_pair_sums(f: np.ndarray) -> np.ndarray:
    """``sum_{i != j in S} F_ij`` for every silent-set bitmask S."""
    sums = np.zeros(1)
    for b in range(f.shape[0]):
        bits = ((np.arange(2**b)[:, None] >> np.arange(b)) & 1).astype(float)
        sums = np.concatenate([sums, sums + 2.0 * (bits @ f[b, :b])])
    return sums


def _popcount(masks: np.ndarray) -> np.ndarray:
    counts = np.zeros(masks.shape, dtype=np.int64)
    work = masks.copy()
    while np.any(work):
        counts += work & 1
        work >>= 1
    return counts


def _normalised(probabilities: np.ndarray) -> np.ndarray:
    probs = np.clip(probabilities, 0.0, None)
    return probs / probs.sum()


def pattern_distributions(
    state: TruncatedState,
    params: WitnessParams,
    spec: DisplacementSpec,
    conventions: Conventions | None = None,
    p_dc: float = 0.0,
) -> dict[str, PatternDistribution]:
    """Exact outcome distributions and per-outcome scores of the three settings.

    Raises:
        DimensionGuardError: Above ``FOCK__MAX_PATTERN_MODES`` parties.
    """
    conventions = conventions or Conventions()
    n = state.n_modes
    if params.n_parties != n or spec.n_modes != n:
        raise ValueError("state, witness and displacement disagree on the number of parties")
    masks = np.arange(2**n, dtype=np.int64)
    clicks = _popcount(masks)

    displaced = click_stats(state, spec.nominal_array, conventions.phase_averaging, p_dc)
    o_scores = (n - 2.0 * clicks) ** 2 - n

    plain = click_stats(state, None, NO_AVERAGING, p_dc)
    f = f_coeffs(spec)
    silent_pairs = _silent_pair_sums(f)[(2**n - 1) ^ masks]
    z_scores = (
        params.lam * (clicks == 0)
        - silent_pairs
        - (n * (n - 1) + params.mu) * (clicks >= 2)
    )

    split = split_balanced(partial_trace(state, [0]), 2)
    coincidence = click_stats(split, None, NO_AVERAGING, p_dc)
    mult = sigma_multiplier(conventions.sigma_convention)
    s_scores = np.zeros(4)
    s_scores[3] = -float(n * (n - 1)) * n * mult

    return {
        "o": PatternDistribution("o", _normalised(displaced.patterns), o_scores.astype(float)),
        "z": PatternDistribution("z", _normalised(plain.patterns), z_scores.astype(float)),
        "s": PatternDistribution("s", _normalised(coincidence.patterns), s_scores),
    }


def _block_sizes(total: int, block_size: int) -> list[int]:
    full, rest = divmod(total, block_size)
    return [block_size] * full + ([rest] if rest else [])


def _draw(seed: int, setting: int, block: int, size: int, probs: np.ndarray) -> np.ndarray:
    sequence = np.random.SeedSequence(seed, spawn_key=(setting, block))
    rng = np.random.Generator(np.random.Philox(sequence))
    return rng.multinomial(size, probs)


def sample_outcomes(
    dist: PatternDistribution,
    count: int,
    seed: int,
    setting: int,
    workers: int | None = None,
) -> np.ndarray:
    """Histogram of ``count`` outcomes drawn from ``dist``."""
    block_size = app_settings.simulation.trial_block_size
    blocks = list(enumerate(_block_sizes(count, block_size)))
    histograms = parallel_map(
        lambda item: _draw(seed, setting, item[0], item[1], dist.probabilities),
        blocks,
        workers,
    )
    return np.sum(histograms, axis=0)


def _mean_and_variance(histogram: np.ndarray, scores: np.ndarray) -> tuple[float, float]:
    count = int(histogram.sum())
    mean = float(histogram @ scores) / count
    if count < 2:
        return mean, 0.0
    variance = float(histogram @ (scores - mean) ** 2) / (count - 1)
    return mean, variance


def sample_trials(
    model: SourceModel,
    params: WitnessParams,
    spec: DisplacementSpec,
    counts: tuple[int, int, int],
    seed: int,
    conventions: Conventions | None = None,
    workers: int | None = None,
) -> TrialCounts:
    """Simulated sample means of the three observables.

    ``counts`` are the trial numbers ``(n, m, l)`` of the o, z and s settings.
    """
    if len(counts) != 3 or any(int(c) < 1 for c in counts):
        raise ValueError("counts must be three positive trial numbers (n, m, l)")
    if model.n_parties != params.n_parties:
        raise ValueError("source model and witness disagree on the number of parties")
    dists = pattern_distributions(make_state(model), params, spec, conventions, model.p_dc)
    stats: dict[str, tuple[float, float]] = {}
    for index, name in enumerate(_SETTINGS):
        histogram = sample_outcomes(dists[name], int(counts[index]), seed, index, workers)
        stats[name] = _mean_and_variance(histogram, dists[name].scores)
    logger.info(
        f"Sampled {sum(int(c) for c in counts)} trials for N={model.n_parties} (seed {seed})"
    )
    n = params.n_parties
    return TrialCounts(
        o_bar=stats["o"][0],
        z_bar=stats["z"][0],
        s_bar=min(0.0, stats["s"][0]),
        n=int(counts[0]),
        m=int(counts[1]),
        l=int(counts[2]),
        n_parties=n,
        seed=seed,
        o_var=stats["o"][1],
        z_var=stats["z"][1],
        s_var=stats["s"][1],
    )


__all__ = [
    "PatternDistribution",
    "pattern_distributions",
    "sample_outcomes",
    "sample_trials",
]
