"""Exception and warning types raised across the package."""


class EEGScreenError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(EEGScreenError, ValueError):
    pass


class DegenerateInputError(EEGScreenError, ValueError):
    """Input carries no usable variation (constant or empty signal, single class...)."""


class EstimationFailedError(EEGScreenError, RuntimeError):
    pass


class IntegrationFailedError(EEGScreenError, RuntimeError):
    pass


class TrainingFailedError(EEGScreenError, RuntimeError):
    """Iterative training did not converge."""

    def __init__(self, message, iterations):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class DegeneracyWarning(UserWarning):
    """A result was computed under a documented fallback rule (0/0, zero std...)."""
