"""Exception hierarchy shared by all modules."""


class Su11Error(Exception):
    """Base class for every error raised by su11dyn."""


class DomainError(Su11Error, ValueError):
    """A time or parameter lies outside the model's domain."""


class SingularityError(Su11Error, ValueError):
    """A matrix that must be invertible is (numerically) singular."""


class NormalizationError(Su11Error, ArithmeticError):
    """Tr{U rho U^dagger} is not positive."""


class ToleranceError(Su11Error, ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SolvabilityError(Su11Error, ArithmeticError):
    """The solvability integrand is genuinely singular (Lambda = 0 with sin(Theta) != 0)."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class StiffnessError(Su11Error, ArithmeticError):
    """The oracle integrator could not advance (step-size underflow or non-finite rates)."""

    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class DegenerateCouplingError(Su11Error, ValueError):
    """sin(theta) = 0: the sink-source model has no PT coupling."""


class ConfigError(Su11Error, ValueError):
    """Invalid CLI / run configuration."""
