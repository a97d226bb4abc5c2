"""
PPR cache repository interface (port).
"""

from src.domain.ppr.entities import PPRCache
from src.domain.shared.repositories import ArtifactRepository


class PPRCacheRepository(ArtifactRepository[PPRCache]):
    """
    Repository interface for offline PPR caches.
    """

    pass
