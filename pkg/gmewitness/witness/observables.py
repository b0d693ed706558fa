"""Expected values of the measured observables and the assembled witness.

The measured lower bound of the witness combines three observables taken
in separate runs:

* ``O = sum_{i != j} sigma_i sigma_j`` with displaced detectors
* ``Z = lam P(no click) - sum_{i != j} F_ij P(i, j silent) - (N(N-1) + mu) P(>= 2 clicks)``
  without displacement
* ``Sigma = sum_i Pi^(i)_{n >= 2}``, bounded through the coincidence rate
  of one mode split on a 50/50 beam splitter
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from gmewitness.common.models import (
    DisplacementSpec,
    ObservableTriple,
    SigmaConvention,
    WitnessParams,
    sigma_multiplier,
)
from gmewitness.fock import (
    NO_AVERAGING,
    PhaseAveraging,
    TruncatedState,
    basis_index,
    click_number_distribution,
    click_stats,
    noclick_operator,
    pair_noclick_table,
    partial_trace,
    split_balanced,
    vacuum_pair_table,
)
from gmewitness.witness.coefficients import f_coeffs, m_restricted


def correlators(
    state: TruncatedState,
    alphas: Sequence[float] | np.ndarray,
    avg: PhaseAveraging | None = None,
    p_dc: float = 0.0,
) -> np.ndarray:
    """Matrix of two-body correlators ``<sigma_i sigma_j>`` (unit diagonal)."""
    table = pair_noclick_table(state, alphas, avg, p_dc)
    single = np.diag(table)
    corr = 4.0 * table - 2.0 * single[:, None] - 2.0 * single[None, :] + 1.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def expected_o(
    state: TruncatedState,
    alphas: Sequence[float] | np.ndarray,
    avg: PhaseAveraging | None = None,
    p_dc: float = 0.0,
) -> float:
    """``sum_{i != j} <sigma_i sigma_j>`` from displaced click statistics."""
    corr = correlators(state, alphas, avg, p_dc)
    return float(corr.sum() - np.trace(corr))


def expected_z(
    state: TruncatedState,
    params: WitnessParams,
    f: np.ndarray,
    p_dc: float = 0.0,
) -> float:
    """Expected value of Z from undisplaced click statistics, dark counts applied."""
    _check_parties(state, params)
    dist = click_number_distribution(state, p_dc)
    multi = max(0.0, 1.0 - dist[0] - dist[1])
    pairs = vacuum_pair_table(state, p_dc)
    f_offdiag = np.asarray(f, dtype=float).copy()
    np.fill_diagonal(f_offdiag, 0.0)
    n = params.n_parties
    return float(
        params.lam * dist[0]
        - np.sum(f_offdiag * pairs)
        - (n * (n - 1) + params.mu) * multi
    )


def local_multiphoton(
    state: TruncatedState, mode: int = 0, p_dc: float = 0.0
) -> tuple[float, float]:
    """Coincidence probability after a 50/50 split of one mode, and the bound 2 p_cc.

    Returns:
        ``(p_cc, p_star_local)`` with ``p_star_local = 2 p_cc``
    """
    reduced = partial_trace(state, [mode])
    split = split_balanced(reduced, 2)
    p_cc = click_stats(split, None, NO_AVERAGING, p_dc).pattern_prob([0, 1])
    return p_cc, 2.0 * p_cc


def sigma_expectation(
    state: TruncatedState,
    sigma_convention: SigmaConvention = "conservative",
    symmetric: bool = True,
    p_dc: float = 0.0,
) -> float:
    """Estimate of ``<Sigma_{n>=2}>``.

    With ``symmetric`` every mode is assumed to behave like mode 0, so
    only that mode is probed and the value is multiplied by N.
    """
    mult = sigma_multiplier(sigma_convention)
    if symmetric:
        return state.n_modes * mult * local_multiphoton(state, 0, p_dc)[0]
    return float(
        sum(mult * local_multiphoton(state, i, p_dc)[0] for i in range(state.n_modes))
    )


def p_star(
    state: TruncatedState,
    symmetric: bool = True,
    p_dc: float = 0.0,
    sigma_convention: SigmaConvention = "conservative",
) -> float:
    """Upper bound on the probability of two or more photons in total."""
    dist = click_number_distribution(state, p_dc)
    multi = max(0.0, 1.0 - dist[0] - dist[1])
    return float(min(1.0, multi + sigma_expectation(state, sigma_convention, symmetric, p_dc)))


def witness_value(
    state: TruncatedState,
    params: WitnessParams,
    spec: DisplacementSpec,
    avg: PhaseAveraging | None = None,
    p_dc: float = 0.0,
    sigma_convention: SigmaConvention = "conservative",
    symmetric: bool = True,
) -> tuple[float, ObservableTriple]:
    """Measured lower bound ``o + z - N(N-1) <Sigma>`` of the witness and its parts."""
    _check_parties(state, params)
    if spec.n_modes != state.n_modes:
        raise ValueError("displacement spec and state disagree on the number of modes")
    n = params.n_parties
    o = expected_o(state, spec.nominal_array, avg, p_dc)
    z = expected_z(state, params, f_coeffs(spec), p_dc)
    sigma = sigma_expectation(state, sigma_convention, symmetric, p_dc)
    dist = click_number_distribution(state, p_dc)
    multi = max(0.0, 1.0 - dist[0] - dist[1])
    triple = ObservableTriple(
        o=o,
        z=z,
        s=-n * (n - 1) * sigma,
        p0=float(dist[0]),
        p_star=float(min(1.0, multi + sigma)),
        sigma_convention=sigma_convention,
    )
    return triple.witness, triple


def single_photon_indices(n_modes: int, n_max: int) -> list[int]:
    """Basis positions of ``|0>, |1_0>, ..., |1_{N-1}>``."""
    index = basis_index(n_modes, n_max)
    rows = [index[(0,) * n_modes]]
    for k in range(n_modes):
        rows.append(index[tuple(1 if i == k else 0 for i in range(n_modes))])
    return rows


def single_photon_block(state: TruncatedState) -> np.ndarray:
    """Density matrix restricted to ``[|0>, |1_0>, ..., |1_{N-1}>]``."""
    rows = single_photon_indices(state.n_modes, state.n_max)
    return state.matrix[np.ix_(rows, rows)]


def o_operator(
    n_modes: int,
    n_max: int,
    alphas: Sequence[float] | np.ndarray,
    avg: PhaseAveraging | None = None,
) -> np.ndarray:
    """Dense phase-averaged ``sum_{i != j} sigma_i sigma_j`` built from no-click operators."""
    n = n_modes
    singles = sum(noclick_operator(n, n_max, [i], alphas, avg) for i in range(n))
    pairs = sum(
        noclick_operator(n, n_max, [i, j], alphas, avg)
        for i in range(n)
        for j in range(i + 1, n)
    )
    dim = singles.shape[0]
    # sigma_i sigma_j = 4 E_ij - 2 E_i - 2 E_j + 1, summed over ordered pairs
    return 8.0 * pairs - 4.0 * (n - 1) * singles + n * (n - 1) * np.eye(dim)


def operator_witness_expectation(
    state: TruncatedState,
    params: WitnessParams,
    alphas: Sequence[float] | np.ndarray,
    avg: PhaseAveraging | None = None,
) -> float:
    """Exact ``<O + M_{n<=1} - N(N-1) Pi_{n>=2} - mu E_{n>=2}>`` without detector relaxation."""
    _check_parties(state, params)
    n = params.n_parties
    o = expected_o(state, alphas, avg)
    m = float(np.real(np.trace(m_restricted(alphas, params.lam) @ single_photon_block(state))))
    pops = state.populations
    two_or_more = float(pops[state.total_photons >= 2].sum())
    spread = float(pops[(state.occupations > 0).sum(axis=1) >= 2].sum())
    return o + m - n * (n - 1) * two_or_more - params.mu * spread


def _check_parties(state: TruncatedState, params: WitnessParams) -> None:
    if state.n_modes != params.n_parties:
        raise ValueError(
            f"state has {state.n_modes} modes but the witness is for {params.n_parties} parties"
        )
