"""Single-mode coefficients of the displaced-parity observable and restricted operators.

For a real displacement ``alpha`` the observable ``sigma = 2|alpha><alpha| - 1``
has the matrix elements

* ``f = <0|sigma|0> = 2 exp(-alpha^2) - 1``
* ``g = <0|sigma|1> = 2 alpha exp(-alpha^2)``
* ``h = <1|sigma|1> = 2 alpha^2 exp(-alpha^2) - 1``

on the vacuum / single-photon subspace. Only products ``g_i g_j`` enter,
so the sign convention of the displacement does not matter.

The restricted operators below act on the (N+1)-dimensional subspace
ordered ``[|0>, |1_0>, ..., |1_{N-1}>]``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from gmewitness.common.models import DisplacementSpec


def fgh(alpha: float | np.ndarray) -> tuple:
    """Return ``(f, g, h)`` for a displacement (scalar or array)."""
    a = np.asarray(alpha, dtype=float)
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise ValueError("displacement amplitude must be finite and non-negative")
    e = np.exp(-(a**2))
    f, g, h = 2.0 * e - 1.0, 2.0 * a * e, 2.0 * a**2 * e - 1.0
    if a.ndim == 0:
        return float(f), float(g), float(h)
    return f, g, h


def _as_alphas(alphas: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(alphas, dtype=float).ravel()
    if arr.size < 2:
        raise ValueError("at least two modes are required")
    return arr


def o_restricted(alphas: Sequence[float] | np.ndarray) -> np.ndarray:
    """Restriction of ``O = sum_{i != j} sigma_i sigma_j`` to photon number <= 1.

    The vacuum entry is ``sum_{i != j} f_i f_j``; ``|1_k>`` has
    ``sum_{i != j; i, j != k} f_i f_j + 2 h_k sum_{j != k} f_j``; the
    coherences are ``2 g_k g_l``. There is no vacuum/single-photon block:
    those terms average out under a common random phase.
    """
    a = _as_alphas(alphas)
    n = a.size
    f, g, h = fgh(a)
    sum_f, sum_f2 = f.sum(), (f**2).sum()
    out = np.zeros((n + 1, n + 1))
    out[0, 0] = sum_f**2 - sum_f2
    rest = sum_f - f
    single = 2.0 * np.outer(g, g)
    np.fill_diagonal(single, rest**2 - (sum_f2 - f**2) + 2.0 * h * rest)
    out[1:, 1:] = single
    return out


def m_restricted(alphas: Sequence[float] | np.ndarray, lam: float) -> np.ndarray:
    """``M_{n<=1} = lam |0><0| - sum_{i != j} f_i f_j (|0><0| + sum_{k != i, j} |1_k><1_k|)``."""
    a = _as_alphas(alphas)
    f, _, _ = fgh(a)
    sum_f, sum_f2 = f.sum(), (f**2).sum()
    pair_total = sum_f**2 - sum_f2
    out = np.zeros((a.size + 1, a.size + 1))
    out[0, 0] = lam - pair_total
    # Pairs avoiding k: total minus pairs that contain k
    avoiding_k = pair_total - 2.0 * f * (sum_f - f)
    out[1:, 1:] = np.diag(-avoiding_k)
    return out


def f_coeffs(spec: DisplacementSpec) -> np.ndarray:
    """Worst-case vacuum coefficients ``F_ij = max(0, max f(alpha_i) f(alpha_j))`` over the box.

    ``f`` is strictly decreasing, so the extremes of the bilinear product
    sit on the corners of the box. The diagonal uses the same rule and is
    never summed (all sums run over i != j).
    """
    f_lo, _, _ = fgh(np.asarray(spec.lower))
    f_hi, _, _ = fgh(np.asarray(spec.upper))
    corners = np.stack(
        [
            np.outer(f_lo, f_lo),
            np.outer(f_lo, f_hi),
            np.outer(f_hi, f_lo),
            np.outer(f_hi, f_hi),
        ]
    )
    return np.maximum(0.0, corners.max(axis=0))
