"""Exception hierarchy for the detproc library.

Two broad groups are distinguished because the command-line interface maps
them onto different exit codes:

* :class:`ValidationError` and subclasses — the *request* was malformed
  (bad parameter values, unsupported inputs).  CLI exit code 2.
* :class:`NumericalError` and subclasses — the request was legal but the
  computation could not be completed to tolerance (divergent quadrature,
  non-convergent series, unstable simulation).  CLI exit code 3.
"""

from __future__ import annotations


class DetprocError(Exception):
    """Base class for all library-specific errors."""


class ValidationError(DetprocError, ValueError):
    """A parameter or input value violates a documented precondition."""


class DomainError(ValidationError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(ValidationError):
    """A requested order/degree exceeds the configured capacity budget."""


class DistributionalBranchError(ValidationError):
    """A transition density was requested on its delta-function branch.

    Zero-time transition kernels are point masses, not functions; callers
    must special-case that branch rather than receive a numeric sentinel.
    """


class AmbiguousRegimeError(ValidationError):
    """An asymptotic evaluation point falls between regime validity bands.

    The caller must either move the point or choose a regime explicitly.
    """


class UnsupportedConfigurationError(ValidationError):
    """A point configuration is outside the implemented class.

    Raised e.g. for configuration-indexed kernels with multiple points,
    which would require the contour-integral form that is not implemented.
    """


class NumericalError(DetprocError):
    """A numerical procedure failed to reach its accuracy contract."""


class TruncationError(NumericalError):
    """A truncated series/sum failed to converge within its term budget."""


class QuadratureError(NumericalError):
    """A quadrature did not converge; carries a residual estimate."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class SamplerInstabilityError(NumericalError):
    """The exact-sampling chain rule hit a numerically invalid density."""


class SimulationError(NumericalError):
    """An SDE simulation could not complete; carries diagnostics.

    Parameters
    ----------
    message : str
        Human-readable description.
    diagnostics : dict, optional
        Step counts, rejection counts, worst gap, etc.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
