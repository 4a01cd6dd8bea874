"""Exception types shared across the pipeline."""


class FrameSieveError(Exception):
    """Base class for all framesieve errors."""


class InvalidInputError(FrameSieveError, ValueError):
    """A signal, matrix, or index argument violates its contract."""


class InvalidParameterError(FrameSieveError, ValueError):
    """A tuning parameter is outside its legal range."""


class InsufficientPoolError(FrameSieveError):
    """A sampling pool is smaller than the requested sample count."""


class FormatError(FrameSieveError, ValueError):
    """A score file, manifest, or image does not match its documented format."""


class ConfigurationError(FrameSieveError):
    """Endpoint or credential configuration is unusable."""


class ScoringError(FrameSieveError):
    """The similarity scorer failed after exhausting retries."""
