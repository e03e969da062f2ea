"""
physics 包初始化
"""

from .errors import (
    OptomechError, ParameterError, NonPhysicalState, UnstableSystem, SingularSystem,
    DivergentDenominator, NotSupported, MeanFieldNotConverged, SimulationSettingsError,
)
from .gaussian_core import (
    EffectiveParams, CovarianceMatrix, build_drift, build_diffusion, build_model,
    symplectic_form, symplectic_eigenvalues, check_physical, VACUUM_VARIANCE,
)
from .lyapunov import is_stable, solve_steady_covariance, lyapunov_residual
from .entropy import (
    EntropyBreakdown, entropy_production, entropy_production_trace,
    entropy_production_offdiagonal, irreversible_drift,
)
from .correlations import (
    OptimizerSettings, MeasurementSeed, DiscordResult, renyi2_entropy,
    mutual_information, conditional_covariance, gaussian_discord,
)
from .meanfield import PhysicalParams, MeanFields, solve_mean_field, effective_params
from .mc_oracle import (
    SimulationSettings, estimate_steady_covariance, estimate_steady_covariance_exact,
)

__all__ = [
    'OptomechError', 'ParameterError', 'NonPhysicalState', 'UnstableSystem',
    'SingularSystem', 'DivergentDenominator', 'NotSupported', 'MeanFieldNotConverged',
    'SimulationSettingsError',
    'EffectiveParams', 'CovarianceMatrix', 'build_drift', 'build_diffusion', 'build_model',
    'symplectic_form', 'symplectic_eigenvalues', 'check_physical', 'VACUUM_VARIANCE',
    'is_stable', 'solve_steady_covariance', 'lyapunov_residual',
    'EntropyBreakdown', 'entropy_production', 'entropy_production_trace',
    'entropy_production_offdiagonal', 'irreversible_drift',
    'OptimizerSettings', 'MeasurementSeed', 'DiscordResult', 'renyi2_entropy',
    'mutual_information', 'conditional_covariance', 'gaussian_discord',
    'PhysicalParams', 'MeanFields', 'solve_mean_field', 'effective_params',
    'SimulationSettings', 'estimate_steady_covariance', 'estimate_steady_covariance_exact',
]
