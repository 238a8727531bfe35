"""Exception hierarchy shared by all services."""

from typing import Any, Optional


class G2PoissonError(Exception):
    """Base class for every error raised by the package."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class OrderMismatchError(G2PoissonError):
    """Operands carry different truncation orders."""


class InsufficientOrderError(G2PoissonError):
    """An identity was demanded beyond the effective order of a jet."""


class ScalarDomainError(G2PoissonError):
    """A value or power is not representable in the active scalar backend."""


class FormDegreeError(G2PoissonError):
    """A form has the wrong degree for the requested operation."""


class PositivityError(G2PoissonError):
    """A 3-form is not positive where a G2-structure is required."""


class FlowDivergenceError(G2PoissonError):
    """The Lie series of a flow pullback does not terminate on jets."""


class NonClosedFormError(G2PoissonError):
    """A closed form was required."""


class StagnationError(G2PoissonError):
    """An iteration failed to raise the residual valuation."""


class NormalizationError(G2PoissonError):
    """The right-hand side is not normalized against the canonical structure."""


class FormFileError(G2PoissonError):
    """A form file could not be parsed or written."""


class PointSolveError(G2PoissonError):
    """No local model matches the right-hand side at the origin."""
