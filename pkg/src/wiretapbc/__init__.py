"""Secrecy capacity regions of Gaussian MIMO broadcast channels with an eavesdropper."""

from .channel import (
    MISOME,
    SADBC,
    SAMBC,
    SGMBC,
    ChannelClass,
    ChannelInstance,
    InputConstraint,
    MisomeChannel,
    aligned_from_general,
    classify,
    to_misome,
)
from .enhance import EnhancedNoise, EnhancementCertificate, ProportionalityCert, build_enhanced, certify_enhancement, proportionality
from .exceptions import (
    ConfigError,
    DegenerateEnhancementError,
    DomainError,
    InvalidInputError,
    NonStationaryError,
    UnsupportedCaseError,
    WiretapError,
)
from .linalg import GenEigenPair, gen_eigen_max, is_psd, log_det, psd_leq
from .misome import (
    build_pencils,
    misome_highsnr,
    misome_rates,
    misome_rates_m,
    misome_region,
    misome_sweep,
    rank_one_split,
)
from .optimizer import (
    KktMultipliers,
    SearchBudget,
    SolveReport,
    WeightedObjective,
    default_mu_grid,
    kkt_residual,
    maximize_weighted_sum,
    project_feasible,
    recover_multipliers,
    trace_boundary,
)
from .regions import (
    CovarianceSplit,
    RatePair,
    RegionPoint,
    RegionPointSet,
    convex_closure,
    dpc_matrix,
    gaussian_rates,
    hull_contains,
    sdpc_rates,
)

__version__ = "0.1.0"
