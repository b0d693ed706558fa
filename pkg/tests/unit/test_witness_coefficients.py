"""Unit tests for the displaced-parity coefficients and restricted operators."""

import math

import numpy as np
import pytest

from gmewitness.common.models import DisplacementSpec
from gmewitness.witness import f_coeffs, fgh, m_restricted, o_restricted
from tests.utils import SQRT_LN2


def test_fgh_at_zero():
    """Without displacement sigma is the vacuum parity: f = 1, g = 0, h = -1."""
    assert fgh(0.0) == (1.0, 0.0, -1.0)


def test_fgh_at_sqrt_ln2():
    """At alpha^2 = ln 2 the vacuum coefficient vanishes."""
    f, g, h = fgh(SQRT_LN2)
    assert f == pytest.approx(0.0, abs=1e-15)
    assert g == pytest.approx(SQRT_LN2)
    assert h == pytest.approx(math.log(2.0) - 1.0)


def test_fgh_vectorised():
    """Arrays come back element-wise."""
    f, g, h = fgh(np.array([0.0, 0.83]))
    assert f.shape == g.shape == h.shape == (2,)
    assert f[1] == pytest.approx(2 * math.exp(-(0.83**2)) - 1)


def test_fgh_rejects_negative():
    """Amplitudes are non-negative magnitudes."""
    with pytest.raises(ValueError, match="non-negative"):
        fgh(-0.1)


class TestRestrictedOperators:
    """Test the photon-number <= 1 restrictions of O and M."""

    def test_o_restricted_w_state(self):
        """<W_N| O |W_N> = 2 (N - 1) ln 2 at alpha = sqrt(ln 2)."""
        n = 4
        o = o_restricted([SQRT_LN2] * n)
        w = np.concatenate([[0.0], np.full(n, 1 / math.sqrt(n))])
        assert w @ o @ w == pytest.approx(2 * (n - 1) * math.log(2.0))
        assert w @ o @ w == pytest.approx(4.1589, abs=1e-4)

    def test_o_restricted_vacuum_entry(self):
        """The vacuum entry is sum_{i != j} f_i f_j."""
        alphas = [0.2, 0.5, 0.9]
        f, _, _ = fgh(np.array(alphas))
        assert o_restricted(alphas)[0, 0] == pytest.approx(f.sum() ** 2 - (f**2).sum())

    def test_o_restricted_symmetric(self):
        """The restriction is a real symmetric matrix without vacuum coherences."""
        o = o_restricted([0.3, 0.6, 0.9, 1.1])
        assert np.allclose(o, o.T)
        assert np.all(o[0, 1:] == 0)

    def test_m_restricted_vacuum_entry(self):
        """At f = 0 the vacuum entry of M is lambda and the single-photon block vanishes."""
        m = m_restricted([SQRT_LN2] * 3, 2.5)
        assert m[0, 0] == pytest.approx(2.5)
        assert np.allclose(m[1:, 1:], 0.0, atol=1e-14)

    def test_m_restricted_pairs_avoiding_k(self):
        """Single-photon diagonal of M counts the pairs that avoid the photon."""
        alphas = [0.1, 0.2, 0.3]
        f, _, _ = fgh(np.array(alphas))
        m = m_restricted(alphas, 1.0)
        assert m[1, 1] == pytest.approx(-2 * f[1] * f[2])

    def test_requires_two_modes(self):
        """Single-mode restrictions make no sense."""
        with pytest.raises(ValueError, match="two modes"):
            o_restricted([0.5])


class TestFCoefficients:
    """Test worst-case vacuum coefficients over a displacement box."""

    def test_degenerate_box(self):
        """Without fluctuations F_ij = f_i f_j (clipped at zero)."""
        spec = DisplacementSpec.degenerate([0.3, 0.5])
        f, _, _ = fgh(np.array([0.3, 0.5]))
        assert f_coeffs(spec) == pytest.approx(np.maximum(0.0, np.outer(f, f)))

    def test_box_takes_worst_corner(self):
        """Straddling the zero of f, the worst corner is the larger same-sign product."""
        spec = DisplacementSpec.uniform(SQRT_LN2, 2, (0.7, 0.9))
        f_lo, _, _ = fgh(0.7)
        f_hi, _, _ = fgh(0.9)
        expected = max(f_lo * f_lo, f_hi * f_hi)
        assert f_coeffs(spec)[0, 1] == pytest.approx(expected)

    def test_non_negative(self):
        """Opposite-sign products are clipped to zero."""
        spec = DisplacementSpec.degenerate([0.1, 1.5])
        assert f_coeffs(spec)[0, 1] == 0.0
