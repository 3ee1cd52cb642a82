"""Kernel and distance measures of (conditional) dependence."""

from ._core import (
    InputError,
    NumericalError,
    avg_hscic,
    conditional_weights,
    cp_constant,
    dcov_v,
    distance_matrix,
    gcdcov_at,
    gcdcov_avg,
    generate,
    gram_matrix,
    h_hat,
    hscic_at,
    hscic_trace,
    hscic_vstat,
    hsic_v,
    local_permutation_test,
    mmd_squared,
    operator_hs_oracle,
    verify,
)

__all__ = [
    "InputError",
    "NumericalError",
    "avg_hscic",
    "conditional_weights",
    "cp_constant",
    "dcov_v",
    "distance_matrix",
    "gcdcov_at",
    "gcdcov_avg",
    "generate",
    "gram_matrix",
    "h_hat",
    "hscic_at",
    "hscic_trace",
    "hscic_vstat",
    "hsic_v",
    "local_permutation_test",
    "mmd_squared",
    "operator_hs_oracle",
    "verify",
]
