"""
Data repository interfaces (ports).
"""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Optional, Union

from src.domain.data.entities import Dataset, InductiveSplit, TransductiveSplit
from src.domain.shared.repositories import ArtifactRepository

Split = Union[TransductiveSplit, InductiveSplit]


class InteractionReader(ABC):
    """
    Reads raw interaction logs into a densely indexed Dataset.
    """

    @abstractmethod
    def read(self, path: Path, rating_threshold: Optional[float] = None) -> Dataset:
        pass


class SplitRepository(ArtifactRepository[Split]):
    """
    Repository interface for split manifests. `path` is a directory.
    """

    pass
