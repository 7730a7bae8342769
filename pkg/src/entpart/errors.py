"""Exception types shared across the package."""


class EntpartError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(EntpartError, ValueError):
    """A matrix or register dimension is unusable (not a power of two, too small, ...)."""


class InvalidIndexError(EntpartError, IndexError):
    """A qubit index is out of range or duplicated."""


class InvalidArgumentError(EntpartError, ValueError):
    """An argument violates a documented precondition."""


class ContractViolationError(EntpartError, ValueError):
    """An input breaks a numerical contract (non-Hermitian, wrong trace, shape mismatch)."""


class IncompleteInputError(EntpartError, ValueError):
    """A required piece of input data is missing."""


class DegenerateDataError(EntpartError, ValueError):
    """The dataset carries no usable structure (e.g. all points identical)."""


class DatasetParseError(EntpartError, ValueError):
    """A dataset or model file is malformed. Carries the offending row when known."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row


class ConfigError(EntpartError, ValueError):
    """An experiment configuration is invalid. Lists every offending field."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid config: " + "; ".join(self.problems))
