"""Numerical verification of the spectral properties of graph-variate operators."""

from theory.checks import (
    check_amplitude_scaling_bounds,
    check_condition_number,
    check_gershgorin_dirichlet,
    check_gershgorin_discs_ic,
    check_indefiniteness_lde,
    check_lde_rank_lift,
    check_parseval,
    check_rank_lift_ic,
)
from theory.reports import (
    ClaimId,
    SpectralBoundReport,
    require_all_passed,
    summarize,
    write_reports_json,
)
from theory.suite import run_theory_suite

__all__ = [
    "ClaimId",
    "SpectralBoundReport",
    "check_amplitude_scaling_bounds",
    "check_condition_number",
    "check_gershgorin_dirichlet",
    "check_gershgorin_discs_ic",
    "check_indefiniteness_lde",
    "check_lde_rank_lift",
    "check_parseval",
    "check_rank_lift_ic",
    "require_all_passed",
    "run_theory_suite",
    "summarize",
    "write_reports_json",
]
