"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class InfeasibleStateError(DomainError):
    """The requested macrostate has no microstates (e.g. more fermions than modes)."""


class PreconditionError(ValueError):
    """Inputs are individually valid but violate a scenario assumption."""


class SizeLimitError(DomainError):
    """Exhaustive enumeration was requested beyond its supported size."""


class ConfigError(ValueError):
    """Invalid configuration. ``line`` and ``field`` locate the problem when known."""

    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.line = line
        self.field = field


class QuasiStaticityError(ConfigError):
    """Membrane speed is too large compared with the thermal speed."""
