"""freqlab: a numerical verification laboratory for backward-uniqueness
and unique-continuation estimates of parabolic equations.

The package manufactures solutions of

    du/dt - Lap u + sum_i b_i d_i u + c u = 0,        u = 0 on the boundary,

on interval and rectangle domains, computes caloric-weighted frequency
functions and companion norms, and checks every identity, monotonicity
statement, and quantitative estimate of the underlying theory against
those solutions, fitting the generic constants and holding them out
against fresh runs.
"""

from .caloric import (
    CaloricWeight,
    check_heat_identity,
    eval_weight,
    eval_weight_gradient,
    eval_weight_hessian,
    eval_weight_time_derivative,
)
from .config import (
    ExperimentConfig,
    canonical_json,
    config_from_dict,
    load_config,
    save_config,
)
from .errors import *  # noqa: F401,F403 (exception taxonomy)
from .frequency import (
    BallEstimate,
    FrequencyTrace,
    HardySides,
    KTConstant,
    check_ball_estimate,
    check_dH_identity,
    check_hardy,
    check_terminal_frequency_bound,
    compute_KT,
    compute_theta,
    compute_trace,
    fit_monotonicity_constant,
)
from .mesh import (
    Domain,
    Grid,
    ObservationBall,
    apply_gradient,
    apply_laplacian,
    boundary_flux,
    build_grid,
    dirichlet_eigenvalue,
    dirichlet_solve,
    interval,
    observation_ball,
    rectangle,
    weighted_inner_product,
)
from .norms import (
    NormTrace,
    check_backward_estimate,
    check_energy_identities,
    check_multiplier_bound,
    check_zeta_growth,
    compute_norm_trace,
    h10_norm,
    hminus1_norm,
    l2_norm,
)
from .reporting import emit_results, load_records_json
from .runner import (
    CheckResult,
    ResultRecord,
    registry_names,
    run_scenario,
    worst_status,
)
from .solver import (
    CoefficientField,
    PDEResidual,
    SolutionTrajectory,
    TimeGrid,
    bump_data,
    check_assumption3,
    check_growth_assumption,
    constant_coefficients,
    eigenfunction_data,
    fourier_coefficients,
    fourier_data,
    pde_residual,
    richardson_pde_tolerance,
    solve_trajectory,
    zero_coefficients,
)
from .sweep import run_sweep
from .uc import (
    UCConstants,
    UCReport,
    compute_constants,
    empirical_gamma_fit,
    refinement_spread,
    verify_theorem_1_1,
    verify_theorem_1_3,
)

__version__ = "0.1.0"
