"""Numerics for variational convergence of Tikhonov regularization.

Grid functions and discrete norms, integral and Galerkin forward
operators with approximating families, Tikhonov functionals with
levelwise perturbations of operator, data, and regularization weight,
solvers with closed-form cross-checks, and studies that turn
Gamma-convergence statements into finite computations with verdicts.
"""

from .config import (
    OutputSpec,
    ProblemSpec,
    RunSpec,
    ScheduleSpec,
    SolverSpec,
    StudySpec,
    build_family,
    build_sequence,
    build_target,
    load_config,
    parse_config,
    resolve_potential,
    truth_profile,
)
from .errors import (
    ConfigError,
    EllipticityError,
    GridCompatibilityError,
    InconsistentDataError,
    NumericalError,
    ResolutionError,
    StudyRefusal,
    UnsupportedPenaltyError,
)
from .fem import (
    EllipticProblem,
    GalerkinLevel,
    RateStudy,
    assemble,
    fem_forward,
    l2_error_vs_exact,
    make_fem_family,
    rate_study,
    solve_bvp,
    thomas_solve,
)
from .functionals import (
    AlphaSchedule,
    ApproxSequence,
    ExtReal,
    NEG_INF,
    NoiseSchedule,
    PenaltySpec,
    POS_INF,
    TikhonovProblem,
    eval_T,
    eval_Tn,
    eval_scaled,
    half_sq_l2,
    is_eps_minimizer,
    linf_penalty,
    make_approx_sequence,
    noise_direction,
    p_power_norm,
    shifted_half_sq,
)
from .grids import (
    GridFunction,
    NormTag,
    from_callable,
    grid_nodes,
    inner_l2,
    norm,
    resample,
    resample_matrix,
    trapezoid_weights,
)
from .operators import (
    DomainSpec,
    ForwardOperator,
    KernelSpec,
    OperatorFamily,
    constant_kernel,
    gaussian_kernel,
    identity_operator,
    integral_apply,
    integral_matrix,
    make_constant_family,
    make_quadrature_family,
    membership,
    norm_ball,
    norm_ball_nonneg,
    separable_kernel,
    standard_samples,
    uniform_gap,
    whole_space,
)
from .solvers import (
    SolveConfig,
    SolveResult,
    grad_check,
    min_penalty_solution,
    minimize_problem,
    projected_gradient,
    solve_linear_quadratic,
)
from .studies import (
    AlphaZeroReport,
    CoercivityProbe,
    EpsChainReport,
    GammaEstimate,
    InfConvergenceReport,
    ScalingReport,
    TOPOLOGY_NOTE,
    alpha_zero_study,
    eps_minimizer_chain,
    equi_coercivity_probe,
    estimate_gamma_limits,
    inf_convergence_study,
    richardson_limit,
    scaling_invariance_check,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ConfigError",
    "EllipticityError",
    "GridCompatibilityError",
    "InconsistentDataError",
    "NumericalError",
    "ResolutionError",
    "StudyRefusal",
    "UnsupportedPenaltyError",
    # grids
    "GridFunction",
    "NormTag",
    "from_callable",
    "grid_nodes",
    "inner_l2",
    "norm",
    "resample",
    "resample_matrix",
    "trapezoid_weights",
    # operators
    "DomainSpec",
    "ForwardOperator",
    "KernelSpec",
    "OperatorFamily",
    "constant_kernel",
    "gaussian_kernel",
    "identity_operator",
    "integral_apply",
    "integral_matrix",
    "make_constant_family",
    "make_quadrature_family",
    "membership",
    "norm_ball",
    "norm_ball_nonneg",
    "separable_kernel",
    "standard_samples",
    "uniform_gap",
    "whole_space",
    # fem
    "EllipticProblem",
    "GalerkinLevel",
    "RateStudy",
    "assemble",
    "fem_forward",
    "l2_error_vs_exact",
    "make_fem_family",
    "rate_study",
    "solve_bvp",
    "thomas_solve",
    # functionals
    "AlphaSchedule",
    "ApproxSequence",
    "ExtReal",
    "NEG_INF",
    "NoiseSchedule",
    "POS_INF",
    "PenaltySpec",
    "TikhonovProblem",
    "eval_T",
    "eval_Tn",
    "eval_scaled",
    "half_sq_l2",
    "is_eps_minimizer",
    "linf_penalty",
    "make_approx_sequence",
    "noise_direction",
    "p_power_norm",
    "shifted_half_sq",
    # config
    "OutputSpec",
    "ProblemSpec",
    "RunSpec",
    "ScheduleSpec",
    "SolverSpec",
    "StudySpec",
    "build_family",
    "build_sequence",
    "build_target",
    "load_config",
    "parse_config",
    "resolve_potential",
    "truth_profile",
    # solvers
    "SolveConfig",
    "SolveResult",
    "grad_check",
    "min_penalty_solution",
    "minimize_problem",
    "projected_gradient",
    "solve_linear_quadratic",
    # studies
    "TOPOLOGY_NOTE",
    "AlphaZeroReport",
    "CoercivityProbe",
    "EpsChainReport",
    "GammaEstimate",
    "InfConvergenceReport",
    "ScalingReport",
    "alpha_zero_study",
    "eps_minimizer_chain",
    "equi_coercivity_probe",
    "estimate_gamma_limits",
    "inf_convergence_study",
    "richardson_limit",
    "scaling_invariance_check",
]
