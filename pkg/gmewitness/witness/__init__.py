"""Witness operator coefficients and expected values of the measured observables."""

from .coefficients import f_coeffs, fgh, m_restricted, o_restricted
from .observables import (
    correlators,
    expected_o,
    expected_z,
    local_multiphoton,
    o_operator,
    operator_witness_expectation,
    p_star,
    sigma_expectation,
    single_photon_block,
    single_photon_indices,
    witness_value,
)

__all__ = [
    "correlators",
    "expected_o",
    "expected_z",
    "f_coeffs",
    "fgh",
    "local_multiphoton",
    "o_operator",
    "m_restricted",
    "o_restricted",
    "operator_witness_expectation",
    "p_star",
    "sigma_expectation",
    "single_photon_block",
    "single_photon_indices",
    "witness_value",
]
