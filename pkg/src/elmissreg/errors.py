"""Exception types shared across the package."""


class ElmissregError(Exception):
    """Base class for all package-specific failures."""


class SingularParameterError(ElmissregError, ValueError):
    """Parameter point rejected by a model's domain check."""


class InsufficientDataError(ElmissregError, ValueError):
    """Too few complete cases to identify the parameter."""


class SingularMatrixError(ElmissregError, ValueError):
    """A matrix required by a statistic cannot be inverted."""


class MethodNotSupportedError(ElmissregError, ValueError):
    """Operation undefined for the requested estimation method."""


class DataFormatError(ElmissregError, ValueError):
    """Malformed dataset file, row, or configuration document."""
