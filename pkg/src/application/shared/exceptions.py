"""
Application layer exceptions raised by the use cases.
Management commands report them as `{"message", "extra"}`.
"""

from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from src.domain.shared.exceptions import DomainException, EntityNotFoundError


class ApplicationError(Exception):
    """
    Base of the use case errors. `extra` holds JSON-serializable context
    (paths, offending fields, diagnostics).
    """

    def __init__(self, message: str, extra: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.extra = extra or {}

    def __str__(self) -> str:
        return self.message


class ValidationError(ApplicationError):
    """Raised when inputs, configuration or stored artifacts are unusable."""

    pass


class NotFoundError(ApplicationError):
    """Raised when a file or an entity is not found."""

    pass


class ConflictError(ApplicationError):
    """Raised when stored artifacts do not belong together (e.g. a checkpoint of another graph)."""

    pass


class TrainingAbortedError(ApplicationError):
    """Raised when training diverged. `extra` names the diagnostics dump."""

    pass


@contextmanager
def domain_errors() -> Iterator[None]:
    """Convert domain exceptions raised inside the block into application exceptions."""
    try:
        yield
    except EntityNotFoundError as e:
        raise NotFoundError(e.message, extra=e.details) from e
    except DomainException as e:
        raise ValidationError(e.message, extra={"error": e.__class__.__name__, **e.details}) from e
    except FileNotFoundError as e:
        raise NotFoundError(f"File not found: {e.filename}", extra={"path": str(e.filename)}) from e
    except OSError as e:
        raise ValidationError(f"Cannot access {e.filename}: {e.strerror}", extra={"path": str(e.filename)}) from e
