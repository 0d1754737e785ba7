"""
Exception hierarchy shared by the verification engine.

Every error derives from ``ValueError`` so callers that only guard against
bad input keep working; the command line maps the subclasses onto exit codes.
"""
from typing import Any, Optional, Tuple


class DriftFluxError(ValueError):
    """Base class for all engine errors."""


class UnsupportedForm(DriftFluxError):
    """An expression escapes the exponential-linear-monomial class."""


class SingularEvaluation(DriftFluxError):
    """A denominator came too close to zero during numeric evaluation."""


class Inconclusive(DriftFluxError):
    """Symbolic cancellation failed and no numeric instantiation is available."""


class OffShellMode(DriftFluxError):
    """A restricted (on-shell) operator was applied to off-shell jets."""


class DomainError(DriftFluxError):
    """Physical or Riemann variables outside the admissible domain."""


class DegenerateJet(DriftFluxError):
    """A jet denominator such as r1_x or r2_x vanishes."""


class BudgetExceeded(DriftFluxError):
    """An expansion would exceed the configured differential order cap."""


class ConstructionFailed(DriftFluxError):
    """A constructed object failed its own verification."""


class DegenerateMetric(DriftFluxError):
    """The metric of a Hamiltonian operator is degenerate."""


class ConstraintViolated(DriftFluxError):
    """A side condition of a check does not hold.

    The partially computed report travels with the exception.
    """

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


class QuadratureInconsistent(DriftFluxError):
    """The two defining equations of the potential disagree on the grid."""


class DegenerateSeed(DriftFluxError):
    """A Klein-Gordon seed lies in the excluded degenerate span."""


class NewtonDiverged(DriftFluxError):
    """Newton inversion failed to converge at a grid node."""

    def __init__(self, message: str, node: Optional[Tuple[int, int]] = None):
        super().__init__(message if node is None else f"{message} at node {node}")
        self.node = node


class JacobianSingular(DriftFluxError):
    """The Jacobian of an implicit solution map is singular."""


class ConfigError(DriftFluxError):
    """Invalid suite configuration."""


class GrammarError(DriftFluxError):
    """Expression text could not be parsed."""


class StoreError(DriftFluxError):
    """Report history could not be read or written."""
