"""Exception types shared across the solver."""


class ConfigError(ValueError):
    """Invalid run or scheme configuration."""


class UnderResolvedGeometry(ValueError):
    """Geometry feature thinner than the stencil reach of the grid."""


class DegenerateInflowSpeed(ValueError):
    """Inflow characteristic speed too close to zero for the ILW recursion."""


class NonPhysicalState(ValueError):
    """Density or pressure lost positivity; carries the offending state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SolverAbort(RuntimeError):
    """Time integration hit NaN/Inf or a nonphysical state; carries stage info."""
