"""Exception types shared across the toolkit."""


class EogHmiError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(EogHmiError, ValueError):
    """A parameter violates an operation's precondition."""


class DegenerateInputError(EogHmiError, ValueError):
    """Input is structurally valid but degenerate for the operation (e.g. constant signal)."""


class ServiceNotReadyError(EogHmiError, RuntimeError):
    """The realtime service was asked to predict before a model/source was configured."""
