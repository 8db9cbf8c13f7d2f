"""Gaussian-attack security analysis toolkit for measurement-device-independent CV-QKD.

Builds attack covariance matrices, derives the post-relay conditional CM
analytically and numerically, computes secret-key rates via purification,
and demonstrates that entangled two-mode attacks generate shared states
that no one-mode Gaussian attack can reproduce.
"""

from .analysis import (
    ReachabilityReport,
    Region,
    RegionPoint,
    SearchSpec,
    SqueezedExclusionReport,
    counterexample_attack,
    one_mode_simulation_search,
    one_mode_x_infimum,
    region_scan,
    squeezed_exclusion_check,
)
from .attacks import (
    AttackClass,
    Interval,
    NoiseAggregates,
    SqueezedOneModeAttack,
    TwoModeAttack,
    attack_cm,
    classify_attack,
    entangled_band,
    noise_aggregates,
    squeezed_aggregates,
)
from .errors import (
    DegenerateDataError,
    InternalConsistencyError,
    UnphysicalStateError,
    ValidationError,
)
from .gaussian import (
    DEFAULT_TOL,
    ConditionalCM,
    CovarianceMatrix,
    Separability,
    apply_symplectic,
    beamsplitter_symplectic,
    entropy_g,
    heterodyne_condition,
    homodyne_condition,
    is_physical,
    ppt_separability,
    symplectic_eigenvalues,
    symplectic_form,
    tmsv_cm,
    von_neumann_entropy,
)
from .keyrate import Detection, Direction, RateConfig, RateResult, holevo_bound, key_rate, mutual_information
from .protocol import (
    ProtocolParams,
    ThetaParams,
    conditional_cm_analytic,
    conditional_cm_numeric,
    theta_params,
    v11,
    v11_from_x,
)
from .simulation import (
    TrialDataset,
    TrialRecord,
    estimate_transmissivities,
    load_dataset,
    reconstruct_conditional_cm,
    reconstruction_standard_errors,
    save_dataset,
    simulate_runs,
)

__version__ = "0.1.0"
