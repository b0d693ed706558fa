"""Biseparable bound: bipartitions, the angle-parametrised eigenvalue problem, and its oracle."""

from .bound import (
    AngleOptimum,
    BoundResult,
    PartitionValue,
    alpha_candidates,
    base_matrix,
    bisep_bound,
    bound_for_partition,
    build_m,
    golden_section_max,
    max_eig,
    uniform_partition_bounds,
    worst_case_bound,
)
from .oracle import brute_force_bound, product_state_vector, witness_tilde_operator
from .partitions import Bipartition, enumerate_bipartitions, partition_count

__all__ = [
    # Partitions
    "Bipartition",
    "enumerate_bipartitions",
    "partition_count",
    # Bound
    "AngleOptimum",
    "BoundResult",
    "PartitionValue",
    "alpha_candidates",
    "base_matrix",
    "bisep_bound",
    "bound_for_partition",
    "build_m",
    "golden_section_max",
    "max_eig",
    "uniform_partition_bounds",
    "worst_case_bound",
    # Oracle
    "brute_force_bound",
    "product_state_vector",
    "witness_tilde_operator",
]
