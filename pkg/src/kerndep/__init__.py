"""Kernel dependence measures with an autoencoder probing harness.

Core surface:

- kernels: KernelSpec, GramMatrix, gram, center, median_heuristic_bandwidth
- hsic: hsic_normalized, hsic_unnormalized, permutation_test
- smi: fit_density_ratio, smi_estimate, smi_fixed_theta, smi_cross_validated
- ae: synthetic sequence data, a from-scratch MLP autoencoder, training
  with per-epoch dependence traces, and a latent-space probe classifier
- trace / plane_svg: JSONL persistence and SVG rendering of those traces

The O(n^2) numeric core runs on a compiled Cython backend when available
and a numpy fallback otherwise; see kerndep.backend_name().
"""

from ._backend import available_backends, backend_name
from .errors import (
    AllPointsIdentical,
    ConfigError,
    DegenerateInput,
    DegenerateLabels,
    DimensionMismatch,
    EmptyTrace,
    EstimateOutOfRange,
    HorizonOutOfRange,
    InstanceTooLarge,
    InvalidSampleMatrix,
    KerndepError,
    MissingSeries,
    NonMonotonicEpoch,
    OutputExists,
    SchemaMismatch,
    SingularSystem,
)
from .hsic import (
    DependenceEstimate,
    PermutationTestResult,
    hsic_brute_force,
    hsic_normalized,
    hsic_unnormalized,
    permutation_test,
)
from .kernels import (
    GramMatrix,
    KernelSpec,
    center,
    gram,
    median_heuristic_bandwidth,
)
from .samples import as_samples, load_samples_csv, save_samples_csv
from .smi import (
    DensityRatioModel,
    SmiConfig,
    fit_density_ratio,
    smi_cross_validated,
    smi_estimate,
    smi_fixed_theta,
)

__version__ = "0.1.0"

__all__ = [
    "AllPointsIdentical",
    "ConfigError",
    "DegenerateInput",
    "DegenerateLabels",
    "DensityRatioModel",
    "DependenceEstimate",
    "DimensionMismatch",
    "EmptyTrace",
    "EstimateOutOfRange",
    "GramMatrix",
    "HorizonOutOfRange",
    "InstanceTooLarge",
    "InvalidSampleMatrix",
    "KernelSpec",
    "KerndepError",
    "MissingSeries",
    "NonMonotonicEpoch",
    "OutputExists",
    "PermutationTestResult",
    "SchemaMismatch",
    "SingularSystem",
    "SmiConfig",
    "as_samples",
    "available_backends",
    "backend_name",
    "center",
    "fit_density_ratio",
    "gram",
    "hsic_brute_force",
    "hsic_normalized",
    "hsic_unnormalized",
    "load_samples_csv",
    "median_heuristic_bandwidth",
    "permutation_test",
    "save_samples_csv",
    "smi_cross_validated",
    "smi_estimate",
    "smi_fixed_theta",
    "__version__",
]
