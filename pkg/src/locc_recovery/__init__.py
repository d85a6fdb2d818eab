"""Majorization-based LOCC convertibility and partial entanglement recovery."""

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    EmptyRegion,
    EmptySpectrum,
    InvalidTransfer,
    NegativeEntry,
    NotApplicable,
    NotARecovery,
    NotARecoveryReason,
    NotConvertibleError,
    NotFeasibleAtZero,
    NotNormalized,
    PatternInfeasible,
    RecoveryError,
    SearchExhausted,
    UniformInput,
)
from .genpairs import (
    PatternSpec,
    SplitMix64,
    mix_toward_uniform,
    pair_with_pattern,
    random_descending,
    robin_hood,
)
from .majorization import (
    MajorizationReport,
    PairClass,
    PairKind,
    classify_pair,
    longest_run,
    majorize,
    prefix_sums,
)
from .oracle import GridSpec, ScanResult, grid_search_2x2, max_recovery_scan, random_search_kxk
from .recovery import (
    Found,
    ImpossibleAtDim,
    NotConvertible,
    OpenProblem,
    Perturbation,
    RecoveryCertificate,
    RecoveryOptions,
    RecoveryPair,
    critical_points_2x2,
    dimension_lower_bound,
    epsilon_max,
    interval_upper_bound_a,
    recover_2x2,
    recover_3x3_delta1,
    recover_general,
    recover_kxk,
    verify_recovery,
)
from .spectra import SchmidtVector, Tolerance, entropy, make_schmidt, tensor_spectrum, uniform

__version__ = "0.1.0"
