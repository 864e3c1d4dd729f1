"""Diffusion bridge samplers with analytic conditional-Gaussian data models.

The package pins a forward diffusion at a known endpoint, runs reverse-time
samplers (a probability flow ODE with a stochastic start, plus stochastic
and deterministic baselines), and checks the structural claims behind them
with closed-form Gaussian oracles.
"""

__version__ = "0.1.0"

from .config import ExperimentConfig, load_config
from .dynamics import (
    h_drift,
    pf_ode_drift,
    reverse_sde_drift,
    reverse_sde_nonlinear,
    score_from_predictor,
    sde_limit_drift,
)
from .errors import (
    BridgeSamplerError,
    ConfigError,
    ConvergenceError,
    DomainError,
    NonFiniteStateError,
    SingularTimeError,
)
from .models import (
    GaussianConditionalModel,
    GaussianMixtureConditionalModel,
    OraclePredictor,
    forward_sample,
    marginal_score_exact,
    posterior_mean,
    sample_x0,
)
from .samplers import (
    METHODS,
    BatchResult,
    SampleRun,
    SamplerConfig,
    deterministic_start_heun,
    em_sde_sample,
    em_start,
    em_start_heun_sample,
    odes3_sample,
    posterior_start,
    run_sampler,
    sample_batch,
)
from .schedule import (
    SPACINGS,
    BridgeCoeffs,
    BridgeSchedule,
    BrownianBridgeSchedule,
    TimeGrid,
    VariancePreservingSchedule,
    alpha,
    coeffs,
    make_schedule,
    make_time_grid,
    rho2,
)
from .validation import (
    ConvergenceStudy,
    GaussianSummary,
    TheoremReport,
    affine_flow_coefficients,
    affine_flow_field,
    check_theorem1,
    check_theorem2,
    check_theorem3,
    convergence_order,
    convergence_study,
    expected_kl_start,
    expected_kl_start_mc,
    fit_order,
    gaussian_flow_oracle,
    kl_gaussian,
    optimal_gaussian_projection,
    rk4_path,
    start_summary,
    wasserstein1_1d,
)

__all__ = [
    "__version__",
    "BridgeSamplerError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "NonFiniteStateError",
    "SingularTimeError",
    "BridgeSchedule",
    "BrownianBridgeSchedule",
    "VariancePreservingSchedule",
    "BridgeCoeffs",
    "TimeGrid",
    "SPACINGS",
    "make_schedule",
    "make_time_grid",
    "alpha",
    "rho2",
    "coeffs",
    "GaussianConditionalModel",
    "GaussianMixtureConditionalModel",
    "OraclePredictor",
    "sample_x0",
    "forward_sample",
    "posterior_mean",
    "marginal_score_exact",
    "h_drift",
    "score_from_predictor",
    "reverse_sde_nonlinear",
    "reverse_sde_drift",
    "pf_ode_drift",
    "sde_limit_drift",
    "METHODS",
    "SamplerConfig",
    "SampleRun",
    "BatchResult",
    "posterior_start",
    "em_start",
    "odes3_sample",
    "em_start_heun_sample",
    "deterministic_start_heun",
    "em_sde_sample",
    "run_sampler",
    "sample_batch",
    "ExperimentConfig",
    "load_config",
    "GaussianSummary",
    "TheoremReport",
    "ConvergenceStudy",
    "kl_gaussian",
    "start_summary",
    "expected_kl_start",
    "expected_kl_start_mc",
    "check_theorem1",
    "check_theorem2",
    "check_theorem3",
    "optimal_gaussian_projection",
    "affine_flow_coefficients",
    "affine_flow_field",
    "rk4_path",
    "gaussian_flow_oracle",
    "fit_order",
    "convergence_study",
    "convergence_order",
    "wasserstein1_1d",
]
