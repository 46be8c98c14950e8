"""Sparsity-constrained group testing.

Pooling designs under tests-per-item and test-size budgets, noiseless
decoders with exact small-instance oracles, zero-error adaptive
schemes, closed-form threshold landmarks, and a deterministic seeded
experiment harness.
"""

from .adaptive import AdaptiveReport, TestOracle, adaptive_delta, adaptive_gamma, \
    binary_splitting
from .decode import Algorithm, DecodeResult, brute_force_optimal_success, comp, \
    count_consistent, dd, dd_success_predicate, empirical_success_rate
from .design import DesignKind, DesignStats, PoolingDesign, build_delta_regular, \
    build_gamma_auto, build_gamma_config, build_gamma_matching, design_stats, \
    matching_m_range, nearest_config_m, nearest_matching_m
from .errors import BudgetError, CapacityError, IntegrityError, ParameterError
from .experiment import CdfRecord, DecoderName, SweepConfig, SweepRecord, SweepSetting, \
    format_csv, read_config, run_adaptive_cdf, run_nonadaptive_sweep, trial_rng, write_csv
from .model import Classification, InfectionVector, OutcomeVector, bernoulli_star_p, \
    classify, compute_outcomes, draw_bernoulli_star, draw_uniform_k_sparse, load_instance, \
    save_instance
from .thresholds import ThresholdSet, delta_dd, m_ada_delta, m_ada_gamma, m_dd_delta, \
    m_dd_gamma, m_inf_delta, m_inf_gamma, matching_bound_gamma, sparsity_ratio_floor, \
    success_upper_bound, theta_of, threshold_set

__version__ = "0.1.0"

__all__ = [
    "AdaptiveReport", "Algorithm", "BudgetError", "CapacityError", "CdfRecord",
    "Classification", "DecodeResult", "DecoderName", "DesignKind", "DesignStats",
    "InfectionVector", "IntegrityError", "OutcomeVector", "ParameterError",
    "PoolingDesign", "SweepConfig", "SweepRecord", "SweepSetting", "TestOracle",
    "ThresholdSet", "adaptive_delta", "adaptive_gamma", "bernoulli_star_p",
    "binary_splitting", "brute_force_optimal_success", "build_delta_regular",
    "build_gamma_auto", "build_gamma_config", "build_gamma_matching", "classify",
    "comp", "compute_outcomes", "count_consistent", "dd", "dd_success_predicate",
    "delta_dd", "design_stats", "draw_bernoulli_star", "draw_uniform_k_sparse",
    "empirical_success_rate", "format_csv", "load_instance", "m_ada_delta",
    "m_ada_gamma", "m_dd_delta", "m_dd_gamma", "m_inf_delta", "m_inf_gamma",
    "matching_bound_gamma", "matching_m_range", "nearest_config_m",
    "nearest_matching_m", "read_config", "run_adaptive_cdf", "run_nonadaptive_sweep",
    "save_instance", "sparsity_ratio_floor", "success_upper_bound", "theta_of",
    "threshold_set", "trial_rng", "write_csv",
]
