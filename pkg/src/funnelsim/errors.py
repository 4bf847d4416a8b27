"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A scenario document is structurally valid but semantically wrong
    (dimension mismatch, funnel widths out of order, initial error outside
    its funnel, inconsistent controller mode, ...)."""


class ConfigSyntaxError(ValueError):
    """A scenario document is not even valid JSON."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class SimulationAbort(RuntimeError):
    """The closed-loop state became non-finite; the partial trace up to the
    failure is still available."""
