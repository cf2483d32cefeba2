"""Lower bounds on CV-QKD key rates with single-photon subtraction, over
fixed-attenuation and beam-wander fading optical channels."""

__version__ = "0.1.0"

from .fock_states import (
    MODES,
    NO_PS,
    R_PS,
    SCHEMES,
    T_PS,
    SchemeConfig,
    SparseFourModeState,
    TruncationWarning,
    analytic_tap_probability,
    bs_coefficient,
    build_state,
    pairing_factor,
    subtraction_probability,
    tmsv_coefficient,
)
from .moments import (
    CovarianceSummary,
    covariance_summary,
    cross_covariance,
    first_moment,
    mean_occupation,
    variance,
)
from .keyrate import (
    KeyRatePoint,
    NumericalDomainError,
    TwoModeCov,
    alice_bob_cov,
    conditional_cov_ef_given_b2,
    eve_cov,
    holevo_bound,
    key_rate,
    key_rate_batch,
    mutual_information,
    symplectic_eigenvalues,
    von_neumann_g,
)
from .channel import (
    AveragedKeyRate,
    FadingModel,
    QuadratureSpec,
    average_key_rate,
    average_key_rates,
    bessel_i,
    cdf,
    distance_to_transmissivity,
    inverse_cdf,
    mean_transmissivity,
    pdf,
    weibull_params,
)
from .sweeps import (
    EXPERIMENTS,
    ExperimentConfig,
    SweepResult,
    emit_csv,
    parse_csv,
    run_experiment,
)

__all__ = [
    "AveragedKeyRate",
    "CovarianceSummary",
    "EXPERIMENTS",
    "ExperimentConfig",
    "FadingModel",
    "KeyRatePoint",
    "MODES",
    "NO_PS",
    "NumericalDomainError",
    "QuadratureSpec",
    "R_PS",
    "SCHEMES",
    "SchemeConfig",
    "SparseFourModeState",
    "SweepResult",
    "T_PS",
    "TruncationWarning",
    "TwoModeCov",
    "alice_bob_cov",
    "analytic_tap_probability",
    "average_key_rate",
    "average_key_rates",
    "bessel_i",
    "bs_coefficient",
    "build_state",
    "cdf",
    "conditional_cov_ef_given_b2",
    "covariance_summary",
    "cross_covariance",
    "distance_to_transmissivity",
    "emit_csv",
    "eve_cov",
    "first_moment",
    "holevo_bound",
    "inverse_cdf",
    "key_rate",
    "key_rate_batch",
    "mean_occupation",
    "mean_transmissivity",
    "mutual_information",
    "pairing_factor",
    "parse_csv",
    "pdf",
    "run_experiment",
    "subtraction_probability",
    "symplectic_eigenvalues",
    "tmsv_coefficient",
    "variance",
    "von_neumann_g",
    "weibull_params",
]
