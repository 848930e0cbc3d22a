"""Exception hierarchy. The CLI maps these onto distinct exit codes."""


class LstcnError(Exception):
    """Base class for all library errors."""


class ValidationError(LstcnError):
    """Invalid argument: bad shape parameter, non-finite data, empty patch."""


class ShapeError(ValidationError):
    """Matrix dimensions do not conform for the requested operation."""


class DataFormatError(LstcnError):
    """Input file could not be parsed (bad CSV row, empty file, bad header)."""


class SingularMatrixError(LstcnError):
    """The regularized normal equations have no unique solution."""


class NotFittedError(LstcnError):
    """The model has not been trained on any patch yet."""
