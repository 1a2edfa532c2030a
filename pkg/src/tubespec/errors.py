"""Exception taxonomy shared across the package.

Two broad families: problems with the user-supplied configuration
(``ConfigError`` and the validation errors) and problems arising during a
computation (``ComputationError`` subclasses).  The CLI maps the families to
distinct exit codes.
"""

from __future__ import annotations


class TubespecError(Exception):
    """Base class for all package errors."""


class ConfigError(TubespecError):
    """Bad run configuration: unknown keys, unreadable files, bad CLI args."""


class ValidationError(ConfigError):
    """A problem spec failed validation; carries one entry per violation."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{field}: {msg}" for field, msg in self.errors))


class NonPositiveAlpha(ValueError):
    pass


class NegativeParameter(ValueError):
    pass


class BetaOutOfRange(ValueError):
    pass


class ComputationError(TubespecError):
    """Base class for runtime numerical failures."""


class ExcludedPoint(ComputationError):
    """Evaluation requested inside the exclusion disk around -1/alpha."""


class ConfluentBasis(ComputationError):
    """Characteristic exponents (nearly) coincide and retries are exhausted."""


class NoConvergence(ComputationError):
    """An iterative refinement failed to converge within its budget."""


class RootOnContour(ComputationError):
    """A determinant zero pinned the contour after all shift retries."""


class DepthCapExceeded(ComputationError):
    """Subdivision hit the depth cap with winding still above one.

    Raised only when a caller asks for a strict census; the spectrum search
    records these per box and keeps going.
    """


class NotAnEigenvalue(ComputationError):
    """Eigenfunction extraction was attempted away from a determinant zero."""


class ResolutionTooLow(ConfigError):
    """Collocation resolution below the supported minimum."""


class SolverFailure(ComputationError):
    """The dense generalized eigensolver failed."""


class DegreeOverflow(ComputationError):
    """A polynomial state exceeded the supported working degree."""


class DomainViolation(ComputationError):
    """State is not in the operator domain (z != trace of v)."""


class SingularSystem(ComputationError):
    """The boundary algebraic system of the explicit inverse is singular."""


class InsufficientData(ComputationError):
    """Not enough branch-matched records to fit a remainder law."""
