"""Generalized information measures over fuzzy similarity covers, plus the
slope-parametric rate-distortion and rate-tolerance solvers they support."""

from .errors import (
    AllZeroRowError,
    EmptyBallError,
    InvalidPriorError,
    NoFeasibleOutputError,
    NonConvergenceError,
    ProblemFileError,
    RateTolError,
    SupportMismatchError,
    UnequalBallError,
    ZeroLogicalProbabilityError,
)
from .gps import (
    AccuracySpec,
    GaussianConfusion,
    SubsetSampleSet,
    accuracy_to_sigma,
    build_cover,
    confusion,
    confusion_column,
    estimate_membership,
    evaluate_forecast,
    optimize_forecast,
    standard_normal_central_mass,
    standard_normal_central_quantile,
)
from .measures import (
    Alphabet,
    Channel,
    Distribution,
    ExtendedBits,
    SimilarityCover,
    entropy,
    generalized_kullback,
    generalized_mutual_information,
    kl_divergence,
    kullback_information,
    logical_probability,
    predictive_information,
    semantic_normalize,
    set_bayes_posterior,
    shannon_mutual_information,
    single_event_information,
)
from .problemfile import ProblemFile
from .ratedist import (
    DistortionMatrix,
    RDPoint,
    average_distortion,
    ba_fixed_point,
    neglog_distortion,
    rate_at_distortion,
    rate_via_generalized_form,
    rd_curve,
    squared_distortion,
)
from .tolerance import (
    EquivalenceReport,
    ToleranceCover,
    ToleranceSolution,
    check_tolerance_constraint,
    clear_cover_from_threshold,
    complexity_distortion,
    conditional_entropy_given_tolerance,
    minimize_generalized_entropy,
    rate_tolerance,
    structure_function,
    uniform_ball_radius,
    verify_equivalence,
)

__all__ = [
    "AccuracySpec",
    "AllZeroRowError",
    "Alphabet",
    "Channel",
    "Distribution",
    "DistortionMatrix",
    "EmptyBallError",
    "EquivalenceReport",
    "ExtendedBits",
    "GaussianConfusion",
    "InvalidPriorError",
    "NoFeasibleOutputError",
    "NonConvergenceError",
    "ProblemFile",
    "ProblemFileError",
    "RDPoint",
    "RateTolError",
    "SimilarityCover",
    "SubsetSampleSet",
    "SupportMismatchError",
    "ToleranceCover",
    "ToleranceSolution",
    "UnequalBallError",
    "ZeroLogicalProbabilityError",
    "accuracy_to_sigma",
    "average_distortion",
    "ba_fixed_point",
    "build_cover",
    "check_tolerance_constraint",
    "clear_cover_from_threshold",
    "complexity_distortion",
    "conditional_entropy_given_tolerance",
    "confusion",
    "confusion_column",
    "entropy",
    "estimate_membership",
    "evaluate_forecast",
    "generalized_kullback",
    "generalized_mutual_information",
    "kl_divergence",
    "kullback_information",
    "logical_probability",
    "minimize_generalized_entropy",
    "neglog_distortion",
    "optimize_forecast",
    "predictive_information",
    "rate_at_distortion",
    "rate_tolerance",
    "rate_via_generalized_form",
    "rd_curve",
    "semantic_normalize",
    "set_bayes_posterior",
    "shannon_mutual_information",
    "single_event_information",
    "squared_distortion",
    "standard_normal_central_mass",
    "standard_normal_central_quantile",
    "structure_function",
    "uniform_ball_radius",
    "verify_equivalence",
]
