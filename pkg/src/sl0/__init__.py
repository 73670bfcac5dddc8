"""Sparse recovery for underdetermined linear systems by graduated smoothing
of the nonzero count, plus a reproducible Monte Carlo benchmark harness."""

from .errors import (
    DimensionMismatch,
    NonPositiveSigma,
    NotURP,
    ParseError,
    RankDeficient,
    Sl0Error,
    ThresholdUnreachable,
    TooLarge,
    TooManyActive,
    ZeroReference,
    ZeroVector,
)
from .expgen import (
    MixingSpec,
    SourceModel,
    SweepPoint,
    TrialResult,
    generate_mixing,
    generate_problem,
    generate_sources,
    mix,
    mse,
    run_sweep,
    run_trial,
    snr_db,
    write_sweep_csv,
    write_trials_csv,
)
from .linalg import (
    ProjectorFactor,
    check_urp,
    compute_M,
    load_matrix,
    load_vector,
    min_norm_solution,
    project_feasible,
    save_matrix,
    save_vector,
)
from .penalty import PenaltyFamily
from .solver import (
    DEFAULT_SCHEDULE,
    LevelTrace,
    SolveReport,
    SolverConfig,
    auto_sigma1,
    error_upper_bound,
    geometric_schedule,
    irls_solve,
    sl0_solve,
    sl0_solve_batch,
    suggest_sigma_floor_noisy,
    write_report_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatch",
    "NonPositiveSigma",
    "NotURP",
    "ParseError",
    "RankDeficient",
    "Sl0Error",
    "ThresholdUnreachable",
    "TooLarge",
    "TooManyActive",
    "ZeroReference",
    "ZeroVector",
    "MixingSpec",
    "SourceModel",
    "SweepPoint",
    "TrialResult",
    "generate_mixing",
    "generate_problem",
    "generate_sources",
    "mix",
    "mse",
    "run_sweep",
    "run_trial",
    "snr_db",
    "write_sweep_csv",
    "write_trials_csv",
    "ProjectorFactor",
    "check_urp",
    "compute_M",
    "load_matrix",
    "load_vector",
    "min_norm_solution",
    "project_feasible",
    "save_matrix",
    "save_vector",
    "PenaltyFamily",
    "DEFAULT_SCHEDULE",
    "LevelTrace",
    "SolveReport",
    "SolverConfig",
    "auto_sigma1",
    "error_upper_bound",
    "geometric_schedule",
    "irls_solve",
    "sl0_solve",
    "sl0_solve_batch",
    "suggest_sigma_floor_noisy",
    "write_report_csv",
]
