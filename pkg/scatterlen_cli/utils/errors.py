"""Exception hierarchy shared by the core modules and the commands"""


class ScatterlenError(Exception):
    """Base class for domain errors; the CLI maps these to exit code 1."""


class ConfigurationError(ScatterlenError, ValueError):
    """Invalid obstacle configuration or run configuration."""


class GeometryError(ScatterlenError):
    """A computed trajectory violates the obstacle geometry."""


class SolverError(ScatterlenError):
    """Periodic-orbit solver did not converge.

    Attributes:
        word: itinerary being solved
        iterations: iterations spent
        gradient_norm: last sup-norm of the gradient
    """

    def __init__(self, message, word=None, iterations=None, gradient_norm=None):
        super().__init__(message)
        self.word = word
        self.iterations = iterations
        self.gradient_norm = gradient_norm


class SpectrumError(ScatterlenError):
    """The spectrum does not contain the orbits an operation needs."""


class SpectrumFormatError(ScatterlenError):
    """A spectrum file could not be parsed.

    Attributes:
        row: 1-based line number of the offending line, if known
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"line {row}: {message}"
        super().__init__(message)
        self.row = row


class StaleCacheError(SpectrumFormatError):
    """The spectrum file was built for a different geometry."""
