"""Tester-learners for origin-centered halfspaces under Massart and adversarial
label noise, with statistical certification of the marginal distribution."""

from .core import (
    LabeledDataset,
    MultiIndex,
    RngSeed,
    UnitVector,
    angle_between,
    enumerate_multi_indices,
    project_to_sphere,
    tangential_component,
)
from .datagen import (
    MarginalSpec,
    NoiseSpec,
    PlanarMixtureParams,
    apply_noise,
    brute_force_opt_2d,
    read_dataset_csv,
    sample_marginal,
    write_dataset_csv,
)
from .optimizer import CandidateList, PsgdConfig, full_gradient_norm, psgd_candidates
from .pipeline import (
    AgnosticConfig,
    LearnResult,
    MassartConfig,
    empirical_error,
    learn_agnostic,
    learn_massart,
    select_best_candidate,
    sigma_grid_agnostic,
)
from .surrogate import (
    SurrogateParams,
    empirical_surrogate_gradient,
    empirical_surrogate_loss,
    ramp_derivative,
    ramp_value,
)
from .testers import (
    TargetMarginal,
    TesterConfig,
    TesterReport,
    angle_to_error_bound,
    band_mass_tester,
    band_moment_tester,
    gaussian_moment,
    moment_tester,
    operator_norm_symmetric,
    standard_gaussian_target,
    strip_tester,
    tilted_gaussian_target,
)

__version__ = "0.1.0"

__all__ = [
    "AgnosticConfig",
    "CandidateList",
    "LabeledDataset",
    "LearnResult",
    "MarginalSpec",
    "MassartConfig",
    "MultiIndex",
    "NoiseSpec",
    "PlanarMixtureParams",
    "PsgdConfig",
    "RngSeed",
    "SurrogateParams",
    "TargetMarginal",
    "TesterConfig",
    "TesterReport",
    "UnitVector",
    "angle_between",
    "angle_to_error_bound",
    "apply_noise",
    "band_mass_tester",
    "band_moment_tester",
    "brute_force_opt_2d",
    "empirical_error",
    "empirical_surrogate_gradient",
    "empirical_surrogate_loss",
    "enumerate_multi_indices",
    "full_gradient_norm",
    "gaussian_moment",
    "learn_agnostic",
    "learn_massart",
    "moment_tester",
    "operator_norm_symmetric",
    "project_to_sphere",
    "psgd_candidates",
    "ramp_derivative",
    "ramp_value",
    "read_dataset_csv",
    "sample_marginal",
    "select_best_candidate",
    "sigma_grid_agnostic",
    "standard_gaussian_target",
    "strip_tester",
    "tangential_component",
    "tilted_gaussian_target",
    "write_dataset_csv",
]
