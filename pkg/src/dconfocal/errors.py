"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class ParameterError(ValueError):
    """Invalid spectrum or parameter record."""


class SingularStencilError(DomainError):
    """A stencil hits a vanishing denominator."""


class GeometryError(ValueError):
    """Degenerate geometric configuration (non-planar face, parallel lines, ...)."""


class SolverError(RuntimeError):
    """Iterative solver failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
