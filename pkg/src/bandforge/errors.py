"""Exception hierarchy shared by all modules."""


class ForgeError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ForgeError, ValueError):
    """A configuration document is malformed or has unknown keys."""


class PreconditionError(ForgeError, ValueError):
    """Inputs violate a documented precondition.

    ``step`` is the construction step at which the violation was detected,
    or ``None`` if it was caught before any step ran.
    """

    def __init__(self, msg, step=None):
        super().__init__(msg)
        self.step = step


class ConstructionError(ForgeError, RuntimeError):
    """A construction could not complete a step."""

    def __init__(self, msg, step=None, diagnostics=None):
        super().__init__(msg)
        self.step = step
        self.diagnostics = dict(diagnostics or {})


class ConvergenceError(ConstructionError):
    """An iterative numerical routine failed to reach its tolerance."""


class PlankError(ConstructionError):
    """The plank solver could not certify a vector."""
