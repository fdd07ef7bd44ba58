"""Interval-valued Shapley explanations for classifiers with imprecise outputs."""
from .contamination import CredalBox, build_credal_box, epsilon_from_idm, extreme_points
from .core import (CumulativeDistribution, Interval, ProbabilityDistribution, ShapleyIntervalSet,
                   cumulative, make_distribution)
from .data import Dataset, DatasetKind, generate_dataset, load_csv, write_csv
from .divergences import (DivergenceKind, chi2_divergence, distance, kl_divergence, ks_distance,
                          marginal_difference)
from .forest import RandomForestModel, fit_random_forest, predict_proba
from .ks_bounds import (BoundProblemInputs, binary_difference_bounds, difference_bounds,
                        lower_difference_bound, total_gain_bounds, upper_difference_bound)
from .lp import LinearProgram, LpSolution, Sense, Status, solve
from .montecarlo import mc_difference_bounds, mc_distance_bounds, sample_credal, sample_simplex
from .report import ExplanationReport, build_report
from .shapley import (BoundMethod, CoalitionContext, ExplanationConfig, Mode, coalition_weight,
                      decision_strategy, dual_functional_bounds, imprecise_shapley,
                      linear_functional_bounds, precise_shapley, predict_coalition,
                      reachable_reduction, total_gain)

__all__ = [
    "BoundMethod", "BoundProblemInputs", "CoalitionContext", "CredalBox",
    "CumulativeDistribution", "Dataset", "DatasetKind", "DivergenceKind", "ExplanationConfig",
    "ExplanationReport", "Interval", "LinearProgram", "LpSolution", "Mode",
    "ProbabilityDistribution", "RandomForestModel", "Sense", "ShapleyIntervalSet", "Status",
    "binary_difference_bounds", "build_credal_box", "build_report", "chi2_divergence",
    "coalition_weight", "cumulative", "decision_strategy", "difference_bounds", "distance",
    "dual_functional_bounds", "epsilon_from_idm", "extreme_points", "fit_random_forest",
    "generate_dataset", "imprecise_shapley", "kl_divergence", "ks_distance",
    "linear_functional_bounds", "load_csv", "lower_difference_bound", "make_distribution",
    "marginal_difference", "mc_difference_bounds", "mc_distance_bounds", "precise_shapley",
    "predict_coalition", "predict_proba", "reachable_reduction", "sample_credal",
    "sample_simplex", "solve", "total_gain", "total_gain_bounds", "upper_difference_bound",
    "write_csv",
]

__version__ = "0.1.0"
