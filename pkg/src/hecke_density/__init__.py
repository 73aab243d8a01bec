"""Satake local L-factors, Hecke-eigenvalue inequalities, and prime-density
experiments."""

__version__ = "0.1.0"

from .core import (
    Branch,
    FactorKind,
    LocalFactor,
    SatakeTuple,
    from_free_angles,
    is_tempered,
    local_factor,
    mu,
    mu_expanded,
    validate,
)
from .density import (
    DensityEstimate,
    PrimeSubset,
    PrimeTable,
    density_profile,
    dirichlet_ratio,
    lfunc_density_bound,
    natural_ratio,
    partial_summation_check,
    sieve,
    weighted_L,
)
from .series import (
    CoeffSeries,
    coeff_bound,
    expand,
    expand_oracle,
    first_coefficient_identities,
    log_local,
    trace_power,
)
from .sim import (
    SamplerKind,
    SamplerSpec,
    build_assignment,
    sample_satotate_g1,
    sample_uniform,
    satotate_exceed_measure,
    substream,
)
from .verify import (
    BoundReport,
    Mode,
    SatakeAssignment,
    SharpnessReport,
    exceptional_set,
    extremal_tuple,
    lemma_ineq_check,
    lfunc_sharpness_harness,
    log_L_decomposition,
    theorem1_bound,
    theorem2_bound,
    verify_theorem,
)

__all__ = [
    "__version__",
    "Branch",
    "FactorKind",
    "LocalFactor",
    "SatakeTuple",
    "from_free_angles",
    "is_tempered",
    "local_factor",
    "mu",
    "mu_expanded",
    "validate",
    "CoeffSeries",
    "coeff_bound",
    "expand",
    "expand_oracle",
    "first_coefficient_identities",
    "log_local",
    "trace_power",
    "DensityEstimate",
    "PrimeSubset",
    "PrimeTable",
    "density_profile",
    "dirichlet_ratio",
    "lfunc_density_bound",
    "natural_ratio",
    "partial_summation_check",
    "sieve",
    "weighted_L",
    "BoundReport",
    "Mode",
    "SatakeAssignment",
    "SharpnessReport",
    "exceptional_set",
    "extremal_tuple",
    "lemma_ineq_check",
    "lfunc_sharpness_harness",
    "log_L_decomposition",
    "theorem1_bound",
    "theorem2_bound",
    "verify_theorem",
    "SamplerKind",
    "SamplerSpec",
    "build_assignment",
    "sample_satotate_g1",
    "sample_uniform",
    "satotate_exceed_measure",
    "substream",
]
