"""detproc: determinantal processes of noncolliding diffusions.

Correlation kernels (static, space-time, finite-rank, and
configuration-indexed), Fredholm determinants and exact DPP sampling,
stochastic simulation of the underlying interacting diffusions, and the
configuration-space functionals that classify admissible initial data.
"""

from .configuration import Configuration
from .errors import (
    AmbiguousRegimeError,
    CapacityError,
    DetprocError,
    DistributionalBranchError,
    DomainError,
    NumericalError,
    QuadratureError,
    SamplerInstabilityError,
    SimulationError,
    TruncationError,
    UnsupportedConfigurationError,
    ValidationError,
)
from .kernels import (
    DriftDensity,
    KernelFamily,
    KernelSpec,
    SpaceTimePoint,
)

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "DriftDensity",
    "KernelFamily",
    "KernelSpec",
    "SpaceTimePoint",
    "DetprocError",
    "ValidationError",
    "DomainError",
    "CapacityError",
    "DistributionalBranchError",
    "AmbiguousRegimeError",
    "UnsupportedConfigurationError",
    "NumericalError",
    "TruncationError",
    "QuadratureError",
    "SamplerInstabilityError",
    "SimulationError",
    "__version__",
]
