"""
Domain layer exceptions.
These exceptions represent violations of the numerical and data contracts of the domain.
"""

from typing import Optional, Dict, Any


class DomainException(Exception):
    """
    Base exception for all domain errors.
    Domain exceptions represent contract violations inside the core.
    """

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        return self.message


class EntityNotFoundError(DomainException):
    """Raised when a user, item or node is not part of the graph."""

    pass


class InvalidValueError(DomainException):
    """Raised when an argument or value object validation fails."""

    pass


class ConfigurationError(DomainException):
    """Raised when a parameter combination cannot be honoured for the given data."""

    pass


class EmptyDatasetError(DomainException):
    """Raised when loading or filtering leaves no interactions."""

    pass


class ParseError(DomainException):
    """Raised when an interaction file row cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details={**(details or {}), "line": line})
        self.line = line


class ShapeError(DomainException):
    """Raised when array dimensions do not line up."""

    pass


class NumericalError(DomainException):
    """Raised when a non-finite value shows up in a parameter block."""

    def __init__(self, message: str, block: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details={**(details or {}), "block": block})
        self.block = block


class InferenceError(DomainException):
    """Raised when a user representation cannot be inferred."""

    pass


class StateError(DomainException):
    """Raised when an operation runs before the state it depends on exists."""

    pass


class CacheFormatError(DomainException):
    """Raised when a persisted artifact is corrupt or truncated."""

    def __init__(self, message: str, record: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details={**(details or {}), "record": record})
        self.record = record
