# SPDX-License-Identifier: Apache-2.0
"""Probabilistic critical clearing time studies with sparse polynomial chaos."""

from ._core import (
    Distribution,
    PceModel,
    PcctError,
    adaptive_fit,
    compute_cct,
    fit_fixed,
    gauss_rule,
    lhs_unit,
    materialize,
    orthonormal,
    power_flow,
    random_unit,
    run_study,
    sobol_mc_oracle,
    truncated_basis,
)

__all__ = [
    "Distribution",
    "PceModel",
    "PcctError",
    "adaptive_fit",
    "compute_cct",
    "fit_fixed",
    "gauss_rule",
    "lhs_unit",
    "materialize",
    "orthonormal",
    "power_flow",
    "random_unit",
    "run_study",
    "sobol_mc_oracle",
    "truncated_basis",
]
