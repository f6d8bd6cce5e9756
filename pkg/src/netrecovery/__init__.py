"""Recover a parent network from unlabeled noisy samples.

Pipeline: degree-profile graph matching of consecutive samples, optional
cleanup of the composed alignments, aligned averaging, thresholding.
"""

from .alignment import AlignmentResult, RegimeReport, check_regime, multi_cleanup, sequential_match
from .assignment import solve_constrained, solve_max, solve_min
from .errors import (
    ConfigError,
    ConstraintError,
    DegenerateInputError,
    DimensionError,
    DomainError,
    NetRecoveryError,
)
from .graph import Graph, Permutation, compose, degree, frobenius_sq, permute
from .matching import (
    DegreeProfile,
    SeedSet,
    cleanup_pair,
    degree_profile,
    expand_seeds,
    extract_seeds,
    match_degree_profiles,
    profile_distance_matrix,
    tv_distance,
)
from .metrics import TrialMetrics, accuracy, recovery_fraction
from .recovery import AverageMatrix, aligned_average, elbow_threshold, recover, threshold
from .sampling import (
    CorrParams,
    NoiseParams,
    edge_unbiased_alpha,
    sample_correlated_er,
    sample_er,
    sample_noisy,
    to_correlated_params,
)

__version__ = "0.1.0"
