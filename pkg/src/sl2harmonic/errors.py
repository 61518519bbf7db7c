"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain where the operation is defined."""


class PoleError(ArithmeticError):
    """Evaluation hit a pole. ``location`` carries the offending point."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class PreconditionError(ValueError):
    """Input violates an integrability / decay requirement."""


class ResolutionError(RuntimeError):
    """Quadrature grid too coarse for the requested accuracy."""
