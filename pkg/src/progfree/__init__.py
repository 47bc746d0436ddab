"""Dense progression-free subsets of [1..N]: constructions, exact detection,
extremal solving, and density bounds."""

__version__ = "0.1.0"

from .progressions import (
    CROSSCHECK_DELTA,
    DegenerateParameters,
    IntSet,
    LemmaViolation,
    ProgressionType,
    box_half_width,
    classify,
    count_types,
    delta,
    delta_binomial,
    extrapolate,
    find_progressions,
    is_progression,
    lift_modular_progression,
)
from .constructions import (
    AnnuliSpec,
    BehrendConfig,
    ConstructionResult,
    TorusConfig,
    UnsupportedParameters,
    annuli_contains,
    base_case_dim,
    build_behrend_set,
    build_torus_set,
    choose_z,
    delta_formula,
    inductive_dim,
    mu_sigma,
    n0_formula,
    norm_variance,
    rankin_driver,
    recursion_depth,
    sample_normalized_statistic,
    single_shell_config,
)
from .exactsolver import (
    BudgetExceeded,
    ExactRecord,
    exact_r,
    exact_r_table,
    forbidden_masks,
)
from .bounds import (
    R3_CONSTANT,
    BoundReport,
    VolumeEstimate,
    ball_volume,
    ball_volume_log,
    base_case_constant,
    corollary_bound,
    lemma1_bound,
    mc_annuli_volume,
    rho_third_moment,
    theorem_bound,
)
