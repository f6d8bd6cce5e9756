"""Exception types shared across the package."""


class NetRecoveryError(Exception):
    """Base class for all package errors."""


class DimensionError(NetRecoveryError, ValueError):
    """Objects of incompatible size were combined."""


class DomainError(NetRecoveryError, ValueError):
    """A parameter is outside the domain where the operation is defined."""


class ConstraintError(NetRecoveryError, ValueError):
    """Pinned assignment pairs conflict with each other."""


class DegenerateInputError(NetRecoveryError, ValueError):
    """Input carries no usable information (e.g. a constant average matrix)."""


class ConfigError(NetRecoveryError, ValueError):
    """An experiment configuration is malformed."""
