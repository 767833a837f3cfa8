"""Exception types shared across the package."""


class PolyParseError(ValueError):
    """Raised when a polynomial expression cannot be parsed."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class CertificationError(RuntimeError):
    """A certified computation could not be completed.

    This never signals bad input; it means an internal check (exact
    re-multiplication, root identification, trace replay) failed.
    """


class LemmaViolation(RuntimeError):
    """A concrete instance contradicts one of the unit lemmas."""


class JacobiViolation(ValueError):
    """Structure constants fail the Jacobi identity on ``triple``."""

    def __init__(self, triple, residual):
        super().__init__(f"Jacobi identity fails on basis triple {triple}: residual {residual}")
        self.triple = triple
        self.residual = residual


class NotNilpotent(ValueError):
    """The lower central series stabilizes above zero."""
