"""
Artifact repository port. Splits, checkpoints and PPR caches are files;
the infrastructure layer decides their encoding.
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, TypeVar

T = TypeVar("T")


class ArtifactRepository(ABC, Generic[T]):
    """
    Base repository interface for file-backed artifacts.
    All artifact repositories should inherit from this.
    """

    @abstractmethod
    def save(self, artifact: T, path: Path) -> Path:
        """Persist an artifact and return the path written."""
        pass

    @abstractmethod
    def load(self, path: Path) -> T:
        """Load an artifact previously written by `save`."""
        pass

    def exists(self, path: Path) -> bool:
        """Check whether an artifact is present at `path`."""
        return Path(path).exists()
