"""Exception types shared across the toolkit."""


class BridgeSamplerError(Exception):
    """Base class for all toolkit errors."""


class DomainError(BridgeSamplerError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularTimeError(DomainError):
    """A drift or score was requested at a time where it is undefined."""


class ConfigError(BridgeSamplerError, ValueError):
    """An experiment configuration is malformed or inconsistent."""


class NonFiniteStateError(BridgeSamplerError, FloatingPointError):
    """A numerical state became non-finite; the message records where."""


class ConvergenceError(BridgeSamplerError, RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""
