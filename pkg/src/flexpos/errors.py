"""Exception types shared across the toolkit.

The CLI maps these onto distinct exit codes: config problems exit 2,
numerical failures (singular solves, unstable loops) exit 3, usage errors
exit 4.
"""


class ValidationError(ValueError):
    """An input violates a documented invariant (bad shape, range, units)."""


class ConfigError(ValidationError):
    """A configuration file failed to parse or validate."""


class NumericalError(RuntimeError):
    """A numerical operation cannot proceed (singular or ill-conditioned system)."""


class InstabilityError(NumericalError):
    """A closed-loop simulation diverged beyond the workspace bound."""

    def __init__(self, message, step=None, time_s=None):
        super().__init__(message)
        self.step = step
        self.time_s = time_s
