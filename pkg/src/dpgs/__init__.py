"""Differentially private sampling from unbounded multivariate Gaussians.

The package provides replacement-stable covariance/mean estimators, a
propose-test-release gate, private sampling pipelines built from them, and
a numerical audit harness that checks the stability, utility and privacy
properties the design relies on.
"""

from .audit import (
    AdjacentPair,
    AuditReport,
    GridSpec,
    audit_cov_stability,
    audit_density_lemmas,
    audit_end_to_end,
    audit_matrix_bounds,
    audit_mean_stability,
    audit_score_sensitivity,
    audit_tail_facts,
    audit_utility_events,
    relaxed_plan,
    reports_to_csv,
    reports_to_json_lines,
    run_checks,
    strict_plan,
)
from .estimators import (
    EstimatorConfig,
    WeightedCovOutput,
    WeightVectorOutput,
    largest_core,
    largest_good_subset,
    pair_and_rescale,
    stable_cov,
    stable_mean,
)
from .privacy import (
    PrivacyParams,
    PtrOutcome,
    SamplerPlan,
    gate_leakage,
    ladder_granularity,
    noise_multiplier_sq,
    outlier_threshold,
    plan,
    ptr_check,
    reference_size,
)
from .randomness import RngStream, gaussian_vector, uniform_subset, unit_sphere
from .samplers import (
    RunTrace,
    SampleResult,
    cov_aware_mean,
    sample_known_cov,
    sample_unbounded,
)

__all__ = [
    "AdjacentPair",
    "AuditReport",
    "EstimatorConfig",
    "GridSpec",
    "PrivacyParams",
    "PtrOutcome",
    "RngStream",
    "RunTrace",
    "SampleResult",
    "SamplerPlan",
    "WeightVectorOutput",
    "WeightedCovOutput",
    "audit_cov_stability",
    "audit_density_lemmas",
    "audit_end_to_end",
    "audit_matrix_bounds",
    "audit_mean_stability",
    "audit_score_sensitivity",
    "audit_tail_facts",
    "audit_utility_events",
    "cov_aware_mean",
    "gate_leakage",
    "gaussian_vector",
    "ladder_granularity",
    "largest_core",
    "largest_good_subset",
    "noise_multiplier_sq",
    "outlier_threshold",
    "pair_and_rescale",
    "plan",
    "ptr_check",
    "reference_size",
    "relaxed_plan",
    "reports_to_csv",
    "reports_to_json_lines",
    "run_checks",
    "sample_known_cov",
    "sample_unbounded",
    "stable_cov",
    "stable_mean",
    "strict_plan",
    "uniform_subset",
    "unit_sphere",
]

__version__ = "0.1.0"
