"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
data problems exit 3, solver failures exit 4.
"""


class ArssError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ArssError):
    """A hyperparameter or option violates its documented domain."""


class DataError(ArssError):
    """Input data is malformed, inconsistent or out of range."""


class DimensionMismatch(DataError):
    """Operands have incompatible shapes."""


class ParseError(DataError):
    """A file could not be parsed; carries the offending location."""

    def __init__(self, message, path=None, line=None, byte=None):
        loc = []
        if path is not None:
            loc.append(str(path))
        if line is not None:
            loc.append(f"line {line}")
        if byte is not None:
            loc.append(f"byte {byte}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.path = path
        self.line = line
        self.byte = byte


class BadMagic(ParseError):
    """A binary file does not start with the expected magic bytes."""


class MissingLabels(DataError):
    """An operation requiring class labels was given an unlabeled dataset."""


class InvalidCount(DataError):
    """A split or subset size is outside the valid range."""


class InvalidK(DataError):
    """A selection size k is outside 1..N."""


class EmptyTrainingSet(DataError):
    """A classifier was given zero training samples."""


class SolverError(ArssError):
    """Base class for numerical failures inside a solver."""


class SingularSystem(SolverError):
    """A matrix expected to be positive definite failed to factorize."""


class NonFinite(SolverError):
    """An iterate contains NaN or Inf (penalty blow-up or bad config)."""
