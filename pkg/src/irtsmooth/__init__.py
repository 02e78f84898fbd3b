"""Nonparametric (kernel-smoothing) item response theory analysis.

Estimates option characteristic curves from raw response matrices by
Nadaraya-Watson regression on ordinal ability estimates, and derives the
downstream analytics: expected item/test scores with confidence bands,
relative credibility curves and ML abilities, probability-simplex
trajectories, PCA test summaries, and differential item functioning
comparisons.
"""

from .ability import (AbilityEstimates, DistFamily, LatentDistribution,
                      estimate_abilities, rank_subjects, ranks_to_theta,
                      total_score)
from .curves import (ConfidenceConfig, CurveSet, ItemCurves,
                     RelativeCredibility, SubjectScale, conditional_score_sd,
                     confidence_band, credibility_all, eis_stderr,
                     estimate_curves, expected_item_score,
                     expected_test_score, item_total_correlation, occ_stderr,
                     relative_credibility, score_density, score_variance,
                     subject_occ)
from .data import (MISSING, ItemFormat, MissingMode, MissingPolicy,
                   ResponseMatrix, ScoringScheme, apply_missing_policy,
                   build_scoring, ingest_responses, scoring_from_weights)
from .dif import GroupedAnalysis, dif_estimate, qq_expected_scores
from .errors import (DegenerateDensityError, DegenerateGridError,
                     DegenerateLikelihoodError, DomainError,
                     EmptyNeighborhoodError, InputError, IrtSmoothError,
                     ParseError)
from .geometry import (PcaSummary, SimplexTrajectory, barycentric_to_cartesian,
                       pca_summary, simplex_coords)
from .kernel import (EvaluationGrid, Kernel, KernelConfig, build_grid,
                     cv_bandwidth, default_cv_candidates, kernel_eval,
                     nw_estimate, nw_estimate_binned, nw_weights,
                     rule_of_thumb_bandwidth)
from .runner import AnalysisConfig, run_analysis, run_cv_curve, run_dif
from .simulate import ParametricItem, simulate_responses

__version__ = "0.1.0"

__all__ = [
    "AbilityEstimates", "AnalysisConfig", "ConfidenceConfig", "CurveSet",
    "DegenerateDensityError", "DegenerateGridError",
    "DegenerateLikelihoodError", "DistFamily", "DomainError",
    "EmptyNeighborhoodError", "EvaluationGrid", "GroupedAnalysis",
    "InputError", "IrtSmoothError", "ItemCurves", "ItemFormat", "Kernel",
    "KernelConfig", "LatentDistribution", "MISSING", "MissingMode",
    "MissingPolicy", "ParametricItem", "ParseError", "PcaSummary",
    "RelativeCredibility", "ResponseMatrix", "ScoringScheme",
    "SimplexTrajectory", "SubjectScale", "apply_missing_policy",
    "barycentric_to_cartesian", "build_grid", "build_scoring",
    "conditional_score_sd", "confidence_band", "credibility_all",
    "cv_bandwidth", "default_cv_candidates", "dif_estimate", "eis_stderr",
    "estimate_abilities", "estimate_curves", "expected_item_score",
    "expected_test_score", "ingest_responses", "item_total_correlation",
    "kernel_eval", "nw_estimate", "nw_estimate_binned", "nw_weights",
    "occ_stderr", "pca_summary", "qq_expected_scores", "rank_subjects",
    "ranks_to_theta", "relative_credibility", "rule_of_thumb_bandwidth",
    "run_analysis", "run_cv_curve", "run_dif", "score_density",
    "score_variance", "scoring_from_weights", "simplex_coords",
    "simulate_responses", "subject_occ", "total_score",
]
