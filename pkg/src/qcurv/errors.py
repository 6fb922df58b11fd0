"""
:mod:`qcurv.errors`: Exception classes and helper functions for making consistent errors.
"""
from typing import Any, Collection, Dict, Optional, Sequence, Tuple


def value_invalid_msg(name: str, value: Any, valid_values: Collection[Any]) -> str:
    return f"`{name}` value = {value} is invalid; value must be one of {valid_values}."


def type_invalid_msg(name: str, val_type, valid_val_type) -> str:
    return f"`{name}` type = {val_type} is invalid; type must match {valid_val_type}."


def range_invalid_msg(name: str, value: Any, bounds: Tuple[Any, Any]) -> str:
    return (
        f"`{name}` value = {value} is invalid; "
        f"value must lie in the open interval ({bounds[0]}, {bounds[1]})."
    )


class QcurvError(Exception):
    """Base class for all errors raised by qcurv."""


class ParameterDomainError(QcurvError, ValueError):
    pass


class InvariantViolationError(QcurvError, ValueError):
    pass


class UnsupportedDimensionError(QcurvError, ValueError):
    pass


class ConfigurationError(QcurvError, ValueError):
    """
    Raised for inconsistent grids / truncations / dimensions, and for run configs
    that fail validation; in the latter case ``errors`` holds *every* problem found.
    """

    def __init__(self, message: str, errors: Optional[Sequence[str]] = None):
        self.errors = list(errors) if errors else [message]
        super().__init__(message)


class DegenerateInputError(QcurvError, ValueError):
    pass


class InvalidKError(QcurvError, ValueError):
    pass


class DomainError(QcurvError, ValueError):
    pass


class HypothesisError(QcurvError, ValueError):
    pass


class IncompleteInventoryError(QcurvError, ValueError):
    pass


class NumericalFailure(QcurvError, RuntimeError):
    """Base class for failures of a numerical procedure; carries ``diagnostics``."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class CalibrationError(NumericalFailure):
    pass


class NondegeneracyError(NumericalFailure):
    pass


class LeavingPositiveConeError(NumericalFailure):
    pass
