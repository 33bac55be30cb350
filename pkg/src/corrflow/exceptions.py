"""Exception hierarchy for corrflow."""


class CorrflowError(Exception):
    """Base class for all corrflow errors."""


class ConfigurationError(CorrflowError, ValueError):
    """Invalid parameters, mismatched grids or malformed inputs."""


class GuardError(CorrflowError):
    """A state violated the boundary-leak or Nyquist guard.

    ``time`` is set when the violation happened while sampling a trajectory.
    """

    def __init__(self, message, flags=0, time=None):
        super().__init__(message)
        self.flags = flags
        self.time = time


class GridTooSmallError(GuardError):
    """Probability has reached (or is predicted to reach) the box boundary."""

    def __init__(self, message, required_length=None, flags=1, time=None):
        super().__init__(message, flags=flags, time=time)
        self.required_length = required_length


class MomentumOverflowError(GuardError):
    """Momentum density reaches the highest representable wavenumbers."""

    def __init__(self, message, flags=2, time=None):
        super().__init__(message, flags=flags, time=time)


class NormError(CorrflowError, ValueError):
    """A superposition cancelled to (almost) zero norm."""


class ScenarioError(ConfigurationError):
    """One or more scenario validation errors, each carrying a line number."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))
