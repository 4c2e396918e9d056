"""Exact beta-mixing coefficients and intensity-function bounds for finite point processes."""

from .ground import GroundSpace, distance, enumerate_subsets, measure
from .kernels import Box, IsotropicKernel, bound_curve, decay_class, l2_cross_mass, omega
from .mixing import (
    MixingReport,
    alpha_exact,
    beta_exact,
    beta_pq_r_sweep,
    beta_sup_form_check,
    determinant_gap,
    dpp_bound_general,
    dpp_bound_rank,
    dpp_lower_bound,
    mixing_report,
    theorem1_bound,
)
from .process import (
    CorrelationOracle,
    DiscreteDPP,
    FiniteProcess,
    correlation_tuple,
    correlations_of,
    dpp_correlation,
    dpp_to_process,
    expectation_direct,
    expectation_series,
    expectation_series_bi,
    joint_restriction_law,
    principal_minor,
    restriction_law,
    sample,
)
from .transforms import (
    BiSetFunction,
    SetFunction,
    lower_difference,
    lower_difference_bi,
    lower_sum,
    lower_sum_bi,
    restrict,
)

__version__ = "0.1.0"
