"""Exception hierarchy shared across the package."""


class SvarError(Exception):
    """Base class for all svarfit errors."""


class InputError(SvarError, ValueError):
    """Malformed or out-of-contract input (bad shapes, NaNs, bad options)."""


class ModelDomainError(SvarError, ValueError):
    """A model violates a mathematical precondition (non-causal, Sigma not PD)."""


class NumericalError(SvarError, RuntimeError):
    """A numerical operation failed (singular matrix, ill-conditioned solve)."""


class EstimationError(NumericalError):
    """An estimation routine could not produce a fit."""
