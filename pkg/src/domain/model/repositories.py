"""
Checkpoint repository interface (port).
"""

from src.domain.model.entities import Checkpoint
from src.domain.shared.repositories import ArtifactRepository


class CheckpointRepository(ArtifactRepository[Checkpoint]):
    """
    Repository interface for model checkpoints.
    """

    pass
