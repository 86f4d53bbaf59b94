class ConetraceError(Exception):
    """Base class of all errors raised by conetrace."""


class InvalidInputError(ConetraceError, ValueError):
    """Input data violates a precondition."""


class PolygonError(InvalidInputError):
    """Polygon or obstacle configuration cannot be turned into a cone surface."""


class SurfaceFileError(InvalidInputError):
    """Surface description file is missing or malformed."""


class FrequencyFileError(InvalidInputError):
    """Frequency file is missing or contains an invalid line."""


class BudgetExceeded(ConetraceError):
    """The chain search visited more nodes than allowed."""

    def __init__(self, message, nodes=None, budget=None):
        super(BudgetExceeded, self).__init__(message)
        self.nodes = nodes
        self.budget = budget


class GeometricSingularity(ConetraceError, ValueError):
    """Link points are joined by a link geodesic of length pi, the diffraction kernel is singular there."""


class NonConvergent(ConetraceError, ArithmeticError):
    """A regularized sum or quadrature did not settle."""


class GeometricTransitionPresent(ConetraceError, ValueError):
    """Operation requires a strictly diffractive chain."""


class MissingCoefficient(ConetraceError, ValueError):
    """A diffraction coefficient is missing or not finite."""
