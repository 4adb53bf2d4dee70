"""Differentially private PAC learning via probabilistic representations."""

from .model import (
    BudgetError,
    ComplementHypothesis,
    ConceptClass,
    ConstantHypothesis,
    DimensionError,
    FAIL,
    FiniteDistribution,
    Hypothesis,
    LabeledDatabase,
    PointHypothesis,
    TruthTableHypothesis,
    all_zeros_database,
    derive_seed,
    empirical_error,
    evaluate_members,
    generalization_error,
    make_rng,
    point_class,
    sample_database,
)
from .mechanism import (
    DpReport,
    ScoredCandidates,
    UtilityCheck,
    dp_verify,
    exp_mech_distribution,
    exp_mech_sample,
    utility_bound_check,
)
from .representation import (
    HypothesisClass,
    HypothesisFamily,
    MajorityHypothesis,
    MajorityProductClass,
    PrepVerdict,
    boost_alpha,
    boost_beta,
    boost_oracle,
    boost_reweight,
    drep_check,
    lattice_minimax,
    majority_error_bound,
    majority_round_count,
    minimax_adversary,
    minimax_error,
    prep_falsify,
    shrink_draw_count,
    shrink_family,
    stress_member,
    stress_size,
    stress_suite,
    union_representation,
)
from .pointhash import (
    ThresholdHashHypothesis,
    is_prime,
    next_prime,
    point_class_params,
    point_family,
    sample_point_class,
)
from .learner import (
    LearnerConfig,
    extract_representation,
    extraction_run_count,
    nonprivate_learner,
    ppac_learn,
    required_sample_size,
    reweight_distribution,
    truncating_learner,
)
from .optimization import (
    OptimizationProblem,
    SolutionFamily,
    all_clauses,
    bounded_check,
    clause_satisfied,
    e3sat_class_size,
    e3sat_family,
    e3sat_problem,
    opt_extract_representation,
    opt_extraction_execution_count,
    private_optimize,
    private_optimize_distribution,
    random_formula,
    read_formula,
    sanitize_problem,
    sanitize_quality,
    satisfied_fraction,
    write_formula,
)
from .serialize import load_family, save_family

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ComplementHypothesis",
    "ConceptClass",
    "ConstantHypothesis",
    "DimensionError",
    "DpReport",
    "FAIL",
    "FiniteDistribution",
    "Hypothesis",
    "HypothesisClass",
    "HypothesisFamily",
    "LabeledDatabase",
    "LearnerConfig",
    "MajorityHypothesis",
    "MajorityProductClass",
    "OptimizationProblem",
    "PointHypothesis",
    "PrepVerdict",
    "ScoredCandidates",
    "SolutionFamily",
    "ThresholdHashHypothesis",
    "TruthTableHypothesis",
    "UtilityCheck",
    "all_clauses",
    "all_zeros_database",
    "boost_alpha",
    "boost_beta",
    "boost_oracle",
    "boost_reweight",
    "bounded_check",
    "clause_satisfied",
    "derive_seed",
    "dp_verify",
    "drep_check",
    "e3sat_class_size",
    "e3sat_family",
    "e3sat_problem",
    "empirical_error",
    "evaluate_members",
    "exp_mech_distribution",
    "exp_mech_sample",
    "extract_representation",
    "extraction_run_count",
    "generalization_error",
    "is_prime",
    "lattice_minimax",
    "load_family",
    "majority_error_bound",
    "majority_round_count",
    "make_rng",
    "minimax_adversary",
    "minimax_error",
    "next_prime",
    "nonprivate_learner",
    "opt_extract_representation",
    "opt_extraction_execution_count",
    "point_class",
    "point_class_params",
    "point_family",
    "ppac_learn",
    "prep_falsify",
    "private_optimize",
    "private_optimize_distribution",
    "random_formula",
    "read_formula",
    "required_sample_size",
    "reweight_distribution",
    "sample_database",
    "sample_point_class",
    "sanitize_problem",
    "sanitize_quality",
    "satisfied_fraction",
    "save_family",
    "shrink_draw_count",
    "shrink_family",
    "stress_member",
    "stress_size",
    "stress_suite",
    "truncating_learner",
    "union_representation",
    "utility_bound_check",
    "write_formula",
]
